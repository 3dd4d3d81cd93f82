#include "eafe/coeff.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace eafe {

namespace {

std::string point_to_string(const Point& x) {
  std::ostringstream os;
  os << '(';
  for (int c = 0; c < x.size(); ++c) os << (c ? ", " : "") << x(c);
  os << ')';
  return os.str();
}

void require_spd(const Matrix& D, const Point& x) {
  const Real scale = D.cwiseAbs().maxCoeff();
  if (!D.allFinite() || (D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, Real(1)))
    throw CoefficientError("D is not symmetric at " + point_to_string(x));
  Eigen::LLT<MatrixX> llt{MatrixX(D)};
  if (llt.info() != Eigen::Success)
    throw CoefficientError("D is not positive definite at " + point_to_string(x));
}

}  // namespace

Matrix dispersion_tensor(const DispersionParams& params, const Vector& b) {
  const int dim = static_cast<int>(b.size());
  Matrix D = Matrix::Zero(dim, dim);
  const Real bnorm = b.norm();
  if (bnorm == 0.0) {
    // No flow: pure diffusion limit.
    D = params.k_d * Matrix::Identity(dim, dim);
  } else {
    const Matrix proj = (b * b.transpose()) / bnorm;  // b b^t / |b|
    D = params.k_d * Matrix::Identity(dim, dim) + params.k_t * proj +
        params.k_l * (bnorm * Matrix::Identity(dim, dim) - proj);
  }
  require_spd(D, b);  // the error names the offending velocity
  return D;
}

Vector beta(const CoefficientSet& coeffs, const Point& x) {
  const Matrix D = coeffs.D(x);
  require_spd(D, x);
  Eigen::LLT<MatrixX> llt{MatrixX(D)};
  VectorX rhs = coeffs.b(x);
  VectorX sol = llt.solve(rhs);
  Vector out(coeffs.dim);
  for (int c = 0; c < coeffs.dim; ++c) out(c) = sol(c);
  return out;
}

Real mean_eigenvalue_alpha(const Matrix& D) {
  if (D.rows() == 2) return 0.5 * D.trace();  // both eigenvalues summed
  Eigen::SelfAdjointEigenSolver<MatrixX> es{MatrixX(D), Eigen::EigenvaluesOnly};
  const auto& ev = es.eigenvalues();
  return 0.5 * (ev.minCoeff() + ev.maxCoeff());
}

CoefficientSet alpha_scaled(const CoefficientSet& coeffs) {
  CoefficientSet out = coeffs;
  TensorField D = coeffs.D;
  out.alpha = [D](const Point& x) { return mean_eigenvalue_alpha(D(x)); };
  return out;
}

CoefficientSet make_constant_coefficients(Matrix D, Vector b, Real gamma_value,
                                          ScalarField f, ScalarField g) {
  CoefficientSet c;
  c.dim = static_cast<int>(b.size());
  c.D = [D](const Point&) { return D; };
  c.b = [b](const Point&) { return b; };
  c.gamma = [gamma_value](const Point&) { return gamma_value; };
  c.f = f ? std::move(f) : ScalarField([](const Point&) { return 0.0; });
  c.g = g ? std::move(g) : ScalarField([](const Point&) { return 0.0; });
  c.D_constant = true;
  c.b_constant = true;
  return c;
}

CoefficientSet make_coefficients(int dim, TensorField D, VectorField b,
                                 ScalarField gamma, ScalarField f, ScalarField g) {
  CoefficientSet c;
  c.dim = dim;
  c.D = std::move(D);
  c.b = std::move(b);
  c.gamma = gamma ? std::move(gamma) : ScalarField([](const Point&) { return 0.0; });
  c.f = f ? std::move(f) : ScalarField([](const Point&) { return 0.0; });
  c.g = g ? std::move(g) : ScalarField([](const Point&) { return 0.0; });
  return c;
}

namespace {

// Splits "a, b, c" at top-level commas (depth 0 w.r.t. (), []).
std::vector<std::string> split_top_level(const std::string& text) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string current;
  for (char ch : text) {
    if (ch == '(' || ch == '[') ++depth;
    if (ch == ')' || ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      parts.push_back(current);
      current.clear();
    } else {
      current += ch;
    }
  }
  parts.push_back(current);
  return parts;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Removes one layer of enclosing brackets; returns false if absent.
bool unwrap(const std::string& text, char open, char close, std::string* inner) {
  const std::string t = strip(text);
  if (t.size() < 2 || t.front() != open || t.back() != close) return false;
  int depth = 0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i] == open) ++depth;
    if (t[i] == close) --depth;
    if (depth == 0) return false;  // closes before the end
  }
  *inner = t.substr(1, t.size() - 2);
  return true;
}

FieldExpr parse_entry(const std::string& text, int dim) {
  FieldExpr e = FieldExpr::parse(strip(text));
  if (e.max_var() > dim)
    throw CoefficientError("expression '" + strip(text) + "' uses coordinate " +
                           std::string(1, "xyz"[e.max_var() - 1]) + " invalid for dim " +
                           std::to_string(dim));
  return e;
}

}  // namespace

bool parse_dispersion_call(const std::string& text, DispersionParams* out) {
  const std::string t = strip(text);
  const std::string prefix = "dispersion";
  if (t.rfind(prefix, 0) != 0) return false;
  std::string inner;
  if (!unwrap(t.substr(prefix.size()), '(', ')', &inner))
    throw CoefficientError("malformed dispersion(...) coefficient: '" + t + "'");
  auto parts = split_top_level(inner);
  if (parts.size() != 3)
    throw CoefficientError("dispersion(k_d, k_t, k_l) takes 3 arguments, got " +
                           std::to_string(parts.size()));
  Real vals[3];
  for (int i = 0; i < 3; ++i) {
    FieldExpr e = FieldExpr::parse(strip(parts[i]));
    if (!e.is_constant())
      throw CoefficientError("dispersion parameters must be constants");
    vals[i] = e.eval(0, 0, 0);
  }
  if (out) *out = DispersionParams{vals[0], vals[1], vals[2]};
  return true;
}

ScalarField scalar_from_text(const std::string& text, int dim, bool* is_constant) {
  FieldExpr e = parse_entry(text, dim);
  if (is_constant) *is_constant = e.is_constant();
  return [e](const Point& p) { return e.eval(p); };
}

VectorField vector_from_text(const std::string& text, int dim, bool* is_constant) {
  std::string inner;
  if (!unwrap(text, '(', ')', &inner))
    throw CoefficientError("vector coefficient must look like (expr, expr" +
                           std::string(dim == 3 ? ", expr" : "") + "): '" + strip(text) + "'");
  auto parts = split_top_level(inner);
  if (static_cast<int>(parts.size()) != dim)
    throw CoefficientError("vector coefficient needs " + std::to_string(dim) +
                           " components, got " + std::to_string(parts.size()));
  std::vector<FieldExpr> comps;
  bool constant = true;
  for (const auto& part : parts) {
    comps.push_back(parse_entry(part, dim));
    constant = constant && comps.back().is_constant();
  }
  if (is_constant) *is_constant = constant;
  return [comps, dim](const Point& p) {
    Vector v(dim);
    for (int c = 0; c < dim; ++c) v(c) = comps[static_cast<std::size_t>(c)].eval(p);
    return v;
  };
}

TensorField tensor_from_text(const std::string& text, int dim, bool* is_constant) {
  std::string inner;
  if (!unwrap(text, '[', ']', &inner))
    throw CoefficientError("matrix coefficient must look like [[...],[...]]: '" + strip(text) + "'");
  auto rows = split_top_level(inner);
  if (static_cast<int>(rows.size()) != dim)
    throw CoefficientError("matrix coefficient needs " + std::to_string(dim) + " rows, got " +
                           std::to_string(rows.size()));
  std::vector<std::vector<FieldExpr>> entries(rows.size());
  bool constant = true;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string row_inner;
    if (!unwrap(rows[r], '[', ']', &row_inner))
      throw CoefficientError("matrix row must look like [expr, ...]: '" + strip(rows[r]) + "'");
    auto cols = split_top_level(row_inner);
    if (static_cast<int>(cols.size()) != dim)
      throw CoefficientError("matrix row needs " + std::to_string(dim) + " entries, got " +
                             std::to_string(cols.size()));
    for (const auto& col : cols) {
      entries[r].push_back(parse_entry(col, dim));
      constant = constant && entries[r].back().is_constant();
    }
  }
  if (is_constant) *is_constant = constant;
  return [entries, dim](const Point& p) {
    Matrix D(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        D(r, c) = entries[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].eval(p);
    return D;
  };
}

}  // namespace eafe
