#include "eafe/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string_view>

namespace eafe {

CompressedMatrix compress(Index n, const std::vector<Triplet>& triplets) {
  for (const auto& t : triplets) {
    if (t.row() < 0 || t.row() >= n || t.col() < 0 || t.col() >= n)
      throw Error("compress: triplet index (" + std::to_string(t.row()) + ", " +
                  std::to_string(t.col()) + ") out of range for n = " + std::to_string(n));
    if (!std::isfinite(t.value())) throw Error("compress: non-finite triplet value");
  }
  CompressedMatrix A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

void dump_coordinate(const CompressedMatrix& A, std::ostream& out) {
  char buf[64];
  for (Index r = 0; r < A.outerSize(); ++r)
    for (CompressedMatrix::InnerIterator it(A, r); it; ++it) {
      auto res = std::to_chars(buf, buf + sizeof(buf), it.value());
      out << it.row() + 1 << ' ' << it.col() + 1 << ' '
          << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
    }
}

namespace {

class JacobiPreconditioner {
public:
  explicit JacobiPreconditioner(const CompressedMatrix& A) : inv_diag_(A.rows()) {
    VectorX diag = A.diagonal();
    for (Index i = 0; i < diag.size(); ++i)
      inv_diag_(i) = std::abs(diag(i)) > 1e-300 ? 1.0 / diag(i) : 1.0;
  }
  VectorX apply(const VectorX& v) const { return inv_diag_.cwiseProduct(v); }

private:
  VectorX inv_diag_;
};

// Zero-fill incomplete LU on the existing sparsity pattern (IKJ variant);
// L has unit diagonal and shares storage with U.
class Ilu0Preconditioner {
public:
  explicit Ilu0Preconditioner(const CompressedMatrix& A) : lu_(A) {
    lu_.makeCompressed();
    const Index n = lu_.rows();
    const auto* outer = lu_.outerIndexPtr();
    const auto* inner = lu_.innerIndexPtr();
    auto* values = lu_.valuePtr();

    std::vector<Index> diag_pos(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; ++i)
      for (Index p = outer[i]; p < outer[i + 1]; ++p)
        if (inner[p] == i) diag_pos[static_cast<std::size_t>(i)] = p;

    for (Index i = 0; i < n; ++i) {
      for (Index p = outer[i]; p < outer[i + 1]; ++p) {
        const Index k = inner[p];
        if (k >= i) break;
        const Index dk = diag_pos[static_cast<std::size_t>(k)];
        if (dk < 0 || values[dk] == 0.0) continue;  // skip unusable pivot
        values[p] /= values[dk];
        const Real lik = values[p];
        // Subtract lik * U(k, j) for j > k present in row i.
        Index pk = dk + 1;
        Index pi = p + 1;
        while (pk < outer[k + 1] && pi < outer[i + 1]) {
          if (inner[pk] < inner[pi]) {
            ++pk;
          } else if (inner[pk] > inner[pi]) {
            ++pi;
          } else {
            values[pi] -= lik * values[pk];
            ++pk;
            ++pi;
          }
        }
      }
    }
  }

  VectorX apply(const VectorX& v) const {
    const Index n = lu_.rows();
    const auto* outer = lu_.outerIndexPtr();
    const auto* inner = lu_.innerIndexPtr();
    const auto* values = lu_.valuePtr();
    VectorX y(n);
    for (Index i = 0; i < n; ++i) {  // L y = v, unit lower
      Real s = v(i);
      for (Index p = outer[i]; p < outer[i + 1] && inner[p] < i; ++p) s -= values[p] * y(inner[p]);
      y(i) = s;
    }
    VectorX x(n);
    for (Index i = n - 1; i >= 0; --i) {  // U x = y
      Real s = y(i);
      Real d = 1.0;
      for (Index p = outer[i]; p < outer[i + 1]; ++p) {
        if (inner[p] > i) s -= values[p] * x(inner[p]);
        if (inner[p] == i) d = values[p];
      }
      x(i) = std::abs(d) > 1e-300 ? s / d : s;
    }
    return x;
  }

private:
  CompressedMatrix lu_;
};

struct AnyPreconditioner {
  Preconditioner kind;
  std::optional<JacobiPreconditioner> jacobi;
  std::optional<Ilu0Preconditioner> ilu;

  explicit AnyPreconditioner(const CompressedMatrix& A, Preconditioner kind_) : kind(kind_) {
    if (kind == Preconditioner::Jacobi) jacobi.emplace(A);
    if (kind == Preconditioner::ILU0) ilu.emplace(A);
  }
  VectorX apply(const VectorX& v) const {
    switch (kind) {
      case Preconditioner::Jacobi: return jacobi->apply(v);
      case Preconditioner::ILU0: return ilu->apply(v);
      case Preconditioner::None: break;
    }
    return v;
  }
  const char* name() const {
    switch (kind) {
      case Preconditioner::Jacobi: return "jacobi";
      case Preconditioner::ILU0: return "ilu0";
      case Preconditioner::None: break;
    }
    return "none";
  }
};

// Right-preconditioned restarted GMRES with modified Gram-Schmidt and Givens
// rotations; the monitored residual is the true residual of A x = b.
int gmres(const CompressedMatrix& A, const VectorX& b, const AnyPreconditioner& M,
          Real tol, int max_iter, int restart, VectorX& x) {
  const Index n = A.rows();
  const Real bnorm = b.norm();
  const Real target = tol * (bnorm > 0 ? bnorm : 1.0);
  x = VectorX::Zero(n);
  int iter = 0;

  MatrixX V(n, restart + 1);
  MatrixX H = MatrixX::Zero(restart + 1, restart);
  VectorX cs(restart), sn(restart), g(restart + 1);

  while (iter < max_iter) {
    VectorX r = b - A * x;
    Real beta = r.norm();
    if (beta <= target) return iter;
    V.col(0) = r / beta;
    g.setZero();
    g(0) = beta;

    int j = 0;
    for (; j < restart && iter < max_iter; ++j, ++iter) {
      const VectorX z = M.apply(V.col(j));
      VectorX w = A * z;
      for (int i = 0; i <= j; ++i) {
        H(i, j) = w.dot(V.col(i));
        w -= H(i, j) * V.col(i);
      }
      H(j + 1, j) = w.norm();
      const bool breakdown = H(j + 1, j) < 1e-300;
      if (!breakdown) V.col(j + 1) = w / H(j + 1, j);

      for (int i = 0; i < j; ++i) {  // apply stored rotations
        const Real t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
        H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
        H(i, j) = t;
      }
      const Real denom = std::hypot(H(j, j), H(j + 1, j));
      if (denom < 1e-300) {
        cs(j) = 1.0;
        sn(j) = 0.0;
      } else {
        cs(j) = H(j, j) / denom;
        sn(j) = H(j + 1, j) / denom;
      }
      H(j, j) = cs(j) * H(j, j) + sn(j) * H(j + 1, j);
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);

      if (std::abs(g(j + 1)) <= target || breakdown) {
        ++j;
        ++iter;
        break;
      }
    }

    if (j > 0) {  // triangular solve and update
      VectorX y(j);
      for (int i = j - 1; i >= 0; --i) {
        Real s = g(i);
        for (int k = i + 1; k < j; ++k) s -= H(i, k) * y(k);
        y(i) = std::abs(H(i, i)) > 1e-300 ? s / H(i, i) : 0.0;
      }
      VectorX update = VectorX::Zero(n);
      for (int k = 0; k < j; ++k) update += y(k) * V.col(k);
      x += M.apply(update);
    } else {
      return iter;  // immediate breakdown, nothing to add
    }
  }
  return iter;
}

}  // namespace

std::pair<VectorX, SolveReport> solve(const CompressedMatrix& A, const VectorX& rhs,
                                      const SolverOptions& options) {
  if (A.rows() != A.cols()) throw Error("solve: matrix must be square");
  if (rhs.size() != A.rows()) throw Error("solve: rhs length mismatch");
  const Index n = A.rows();

  VectorX x;
  SolveReport report;

  if (n <= options.dense_threshold) {
    MatrixX dense(A);
    x = Eigen::PartialPivLU<MatrixX>(dense).solve(rhs);
    report.iterations = 1;
    report.method = "dense-lu";
  } else {
    AnyPreconditioner M(A, options.preconditioner);
    report.iterations = gmres(A, rhs, M, options.tol, options.max_iter, options.restart, x);
    report.method = std::string("gmres+") + M.name();
  }

  // Independent residual recomputation decides convergence.
  const Real bnorm = rhs.norm();
  const VectorX r = rhs - A * x;
  report.residual = r.norm() / (bnorm > 0 ? bnorm : 1.0);
  report.converged = std::isfinite(report.residual) && report.residual <= options.tol;
  if (!x.allFinite()) {
    x = VectorX::Zero(n);
    report.residual = std::numeric_limits<Real>::infinity();
    report.converged = false;
  }
  return {std::move(x), report};
}

MMatrixReport mmatrix_check(const CompressedMatrix& A, Index dense_limit) {
  if (A.rows() != A.cols()) throw Error("mmatrix_check: matrix must be square");
  const Index n = A.rows();
  MMatrixReport report;

  Real norm_inf = 0.0;
  for (Index r = 0; r < n; ++r) {
    Real row_sum = 0.0;
    for (CompressedMatrix::InnerIterator it(A, r); it; ++it) row_sum += std::abs(it.value());
    norm_inf = std::max(norm_inf, row_sum);
  }
  const Real tol = 1e-13 * norm_inf;

  report.sign_ok = true;
  report.diag_positive = true;
  report.worst_offdiag = 0.0;
  bool weak_all = true;
  bool strict_any = false;
  for (Index r = 0; r < n; ++r) {
    Real diag = 0.0;
    Real offdiag_abs = 0.0;
    for (CompressedMatrix::InnerIterator it(A, r); it; ++it) {
      if (it.col() == r) {
        diag = it.value();
      } else {
        report.worst_offdiag = std::max(report.worst_offdiag, it.value());
        if (it.value() > tol) report.sign_ok = false;
        offdiag_abs += std::abs(it.value());
      }
    }
    if (!(diag > 0)) report.diag_positive = false;
    if (diag < offdiag_abs - tol) weak_all = false;
    if (diag > offdiag_abs + tol) strict_any = true;
  }
  report.dominance_ok = weak_all && strict_any;

  if (n <= dense_limit) {
    MatrixX dense(A);
    Eigen::FullPivLU<MatrixX> lu(dense);
    if (lu.isInvertible()) {
      MatrixX inv = lu.inverse();
      report.min_inverse_entry = inv.minCoeff();
      const Real inv_scale = inv.cwiseAbs().maxCoeff();
      report.inverse_nonnegative = report.min_inverse_entry >= -1e-12 * std::max(inv_scale, Real(1));
    } else {
      report.inverse_nonnegative = false;
      report.min_inverse_entry = -std::numeric_limits<Real>::infinity();
    }
  }
  return report;
}

}  // namespace eafe
