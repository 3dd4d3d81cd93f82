#ifndef EAFE_ANALYSIS_HPP
#define EAFE_ANALYSIS_HPP

#include "eafe/assembly.hpp"
#include "eafe/coeff.hpp"
#include "eafe/linalg.hpp"
#include "eafe/mesh.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eafe {

/// Per-edge sums of the stiffness edge weights omega_E(D). All sums
/// nonnegative (up to 1e-12 of the largest |omega|) is the mesh condition
/// under which the assembled operator is an M-matrix for every continuous
/// convection field; in 2D with constant D it says the triangulation is
/// Delaunay in the metric of D.
struct MonotonicityReport {
  std::vector<MeshEdge> edges;
  std::vector<Real> edge_sums;     // aligned with edges
  Real min_sum = 0.0;
  Real tolerance = 0.0;            // 1e-12 * max |omega| seen
  std::vector<Index> violators;    // indices into edges
  bool ok = false;

  /// Filled when a cross-validation assembly was requested.
  std::optional<MMatrixReport> matrix_check;
};

MonotonicityReport monotonicity_audit(const SimplicialMesh& mesh, const TensorField& D,
                                      int omega_quad_degree = 1, const ScalarField& alpha = {});

/// Audit plus a matrix-level cross check: assembles the scheme with the given
/// constant scaled-convection field beta (b := D beta), gamma = 0 and
/// all-Dirichlet boundary, then runs mmatrix_check on the eliminated matrix.
MonotonicityReport monotonicity_audit_with_matrix(const SimplicialMesh& mesh,
                                                  const TensorField& D, const Vector& beta_check,
                                                  int omega_quad_degree = 1);

/// Discrete maximum principle experiment: solve with f = 0 and Dirichlet data
/// inside [lo, hi] everywhere. Passing means
///   lo - tol <= u_h <= hi + tol,  tol = 1e-10 (hi - lo + 1).
/// `guaranteed` reflects the mesh audit; when it is false the experiment
/// still runs and reports the actual range.
struct DmpResult {
  Real min_u = 0.0;
  Real max_u = 0.0;
  bool pass = false;
  bool guaranteed = false;
  Real tolerance = 0.0;
  SolveReport solve;
};

DmpResult dmp_experiment(const SimplicialMesh& mesh, const CoefficientSet& coeffs,
                         const std::function<Real(Index, const Point&)>& boundary_values,
                         Real lo, Real hi, const AssemblyOptions& aopts = {},
                         const SolverOptions& sopts = {});

/// Residual |LHS - RHS| of the constant-flux expansion identity on one
/// element: expanding a constant vector J in the lowest-order edge basis
/// phi_E (unit tangential circulation along tau_E) and testing against a P1
/// function v gives
///   sum_E (J . tau_E) int_T D phi_E . grad v  =  sum_E omega_E(D) (J . tau_E) delta_E v.
/// Exact in real arithmetic; the residual is pure roundoff.
Real nedelec_identity_residual(const ElementGeometry& geom, const Matrix& D, const Vector& J,
                               const VectorX& v_local);

/// Magnitude of either side (for relative residual checks).
Real nedelec_identity_scale(const ElementGeometry& geom, const Matrix& D, const Vector& J,
                            const VectorX& v_local);

/// L2 and H1 errors of a P1 nodal field against an exact solution, and
/// against the nodal interpolant of the exact solution, by element-wise
/// quadrature of the requested degree.
struct ErrorNorms {
  Real l2 = 0.0, h1_semi = 0.0, h1 = 0.0;                      // u - u_h
  Real interp_l2 = 0.0, interp_h1_semi = 0.0, interp_h1 = 0.0;  // u_I - u_h
};

ErrorNorms error_norms(const SimplicialMesh& mesh, const VectorX& u_h, const ScalarField& u,
                       const VectorField& grad_u, int quad_degree = 4);

struct ConvergenceRecord {
  int level = 0;
  Real h = 0.0;
  Index dofs = 0;
  Real err_l2 = 0.0;
  Real err_h1_semi = 0.0;
  Real err_h1 = 0.0;
  Real err_interp_h1 = 0.0;
  std::optional<Real> rate_l2;  // log2(e_{2h} / e_h), empty on the first level
  std::optional<Real> rate_h1;  // rate of err_h1
};

struct StudyProblem {
  CoefficientSet coeffs;
  ScalarField exact;
  VectorField exact_grad;
  int dim = 2;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRecord> records;
  bool completed = false;
  std::string error;  // set when a level failed; earlier records are kept

  /// Rate of ||u_I - u_h||_1 between the two finest completed levels.
  std::optional<Real> final_interp_h1_rate() const;
};

/// Runs assemble + solve on structured meshes n = n0 * 2^k, k = 0..levels-1.
ConvergenceStudy convergence_study(const StudyProblem& problem, int levels, int n0,
                                   const AssemblyOptions& aopts = {},
                                   const SolverOptions& sopts = {},
                                   int error_quad_degree = 4);

/// CSV schema:
///   level,h,dofs,err_l2,err_h1_semi,err_h1,err_interp_h1,rate_l2,rate_h1
/// with empty rate cells on the first level. rate_l2 and rate_h1 are the
/// observed log2 ratios of err_l2 and err_h1.
void write_csv(const std::vector<ConvergenceRecord>& records, std::ostream& out);

}  // namespace eafe

#endif
