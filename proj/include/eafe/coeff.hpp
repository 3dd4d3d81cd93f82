#ifndef EAFE_COEFF_HPP
#define EAFE_COEFF_HPP

#include "eafe/expr.hpp"
#include "eafe/types.hpp"

#include <functional>
#include <string>

namespace eafe {

using ScalarField = std::function<Real(const Point&)>;
using VectorField = std::function<Vector(const Point&)>;
using TensorField = std::function<Matrix(const Point&)>;

/// Problem data for  -div(D grad u + b u) + gamma u = f  with Dirichlet,
/// inflow-Neumann (data g) and outflow-Neumann boundary parts.
///
/// D(x) must be symmetric positive definite wherever it is evaluated.
/// Evaluation is reentrant: fields may be called concurrently at distinct
/// points. The constancy flags are declarations used to pick the closed-form
/// edge kernels; they must only be set when the field really is constant.
struct CoefficientSet {
  int dim = 2;
  TensorField D;
  VectorField b;
  ScalarField gamma;
  ScalarField f;
  ScalarField g;

  bool D_constant = false;
  bool b_constant = false;

  /// Optional positive scaling field; set by alpha_scaled(). When present,
  /// assembly uses edge weights built from D/alpha rescaled by the element
  /// average of alpha. The edge potential uses beta = D^{-1} b either way,
  /// so the scaling never changes the exponential data.
  ScalarField alpha;

  bool beta_constant() const { return D_constant && b_constant; }
};

/// Diffusion-dispersion tensor  D = k_d I + k_t b b^t/|b| + k_l (|b| I - b b^t/|b|).
struct DispersionParams {
  Real k_d = 0.0;
  Real k_t = 0.0;
  Real k_l = 0.0;
};

/// Evaluates the dispersion tensor at velocity b; the b = 0 limit is k_d I.
/// Throws CoefficientError if the result is not positive definite.
Matrix dispersion_tensor(const DispersionParams& params, const Vector& b);

/// Solves D(x) beta = b(x) by direct factorization of the small matrix.
/// Throws CoefficientError naming the point when D(x) is not SPD.
Vector beta(const CoefficientSet& coeffs, const Point& x);

/// Scaled-flux variant: alpha(x) = (lambda_min(D) + lambda_max(D)) / 2, with
/// edge weights assembled from D/alpha times the element average of alpha.
/// Reduces exactly to the base scheme whenever D(x) = c(x) I.
CoefficientSet alpha_scaled(const CoefficientSet& coeffs);

/// The alpha field used by alpha_scaled, as a standalone evaluator.
Real mean_eigenvalue_alpha(const Matrix& D);

// Constructors for common cases. Constant data sets the constancy flags.
CoefficientSet make_constant_coefficients(Matrix D, Vector b, Real gamma_value,
                                          ScalarField f, ScalarField g = {});
CoefficientSet make_coefficients(int dim, TensorField D, VectorField b,
                                 ScalarField gamma, ScalarField f, ScalarField g = {});

// Coefficient entries in config syntax: a matrix of expressions
// "[[1,0],[0,1]]", a vector "(y, -x)", a scalar expression "x^2", or the
// special form "dispersion(k_d, k_t, k_l)" for D together with b.
TensorField tensor_from_text(const std::string& text, int dim, bool* is_constant = nullptr);
VectorField vector_from_text(const std::string& text, int dim, bool* is_constant = nullptr);
ScalarField scalar_from_text(const std::string& text, int dim, bool* is_constant = nullptr);
bool parse_dispersion_call(const std::string& text, DispersionParams* out);

}  // namespace eafe

#endif
