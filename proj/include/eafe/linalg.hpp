#ifndef EAFE_LINALG_HPP
#define EAFE_LINALG_HPP

#include "eafe/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eafe {

/// Compressed sparse row matrix from triplets; duplicates are summed, the
/// layout is deterministic for a fixed input order. Throws on out-of-range
/// indices or non-finite values.
CompressedMatrix compress(Index n, const std::vector<Triplet>& triplets);

/// Coordinate text dump, one `i j value` per line, 1-based.
void dump_coordinate(const CompressedMatrix& A, std::ostream& out);

enum class Preconditioner { None, Jacobi, ILU0 };

struct SolverOptions {
  Real tol = 1e-10;        // relative residual target
  int max_iter = 2000;     // total inner iterations
  int restart = 50;
  Preconditioner preconditioner = Preconditioner::Jacobi;
  Index dense_threshold = 400;  // direct LU at or below this order
};

struct SolveReport {
  int iterations = 0;
  Real residual = 0.0;  // recomputed ||Ax - b|| / ||b|| after the solve
  bool converged = false;
  std::string method;
};

/// Solves A x = b: dense LU for small systems, otherwise restarted GMRES with
/// the requested preconditioner. The convergence flag is decided by an
/// independent residual recomputation, never by the iteration alone.
std::pair<VectorX, SolveReport> solve(const CompressedMatrix& A, const VectorX& rhs,
                                      const SolverOptions& options = {});

/// Structured M-matrix verdicts.
///  - sign pattern: off-diagonals <= 1e-13 ||A||_inf, diagonal > 0;
///  - weak row diagonal dominance with at least one strict row (sufficient);
///  - entrywise nonnegative dense inverse for n <= dense_limit (definitive).
struct MMatrixReport {
  bool sign_ok = false;
  bool diag_positive = false;
  Real worst_offdiag = 0.0;            // most positive off-diagonal entry
  bool dominance_ok = false;
  std::optional<bool> inverse_nonnegative;  // set when the dense check ran
  Real min_inverse_entry = 0.0;

  /// Definitive when the inverse was computed, else the sufficient condition.
  bool is_m_matrix() const {
    if (!sign_ok || !diag_positive) return false;
    return inverse_nonnegative ? *inverse_nonnegative : dominance_ok;
  }
};

MMatrixReport mmatrix_check(const CompressedMatrix& A, Index dense_limit = 200);

}  // namespace eafe

#endif
