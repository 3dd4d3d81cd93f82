#ifndef EAFE_QUADRATURE_HPP
#define EAFE_QUADRATURE_HPP

#include "eafe/types.hpp"

#include <vector>

namespace eafe {

/// One-dimensional Gauss-Legendre rule mapped to [0,1].
/// Exact for polynomials of degree 2n-1.
struct GaussRule {
  std::vector<Real> points;
  std::vector<Real> weights;  // sum to 1
};

const GaussRule& gauss_legendre(int n);

/// Quadrature rule on the reference simplex, stored in barycentric
/// coordinates. Weights sum to 1, so on a physical simplex T:
///   integral над T of f  ~=  |T| * sum_q w_q f(x_q),
/// with x_q = sum_k lambda_{q,k} * vertex_k.
struct SimplexRule {
  int dim;
  int degree;              // polynomial degree integrated exactly
  MatrixX barycentric;     // npoints x (dim+1)
  std::vector<Real> weights;
  Index size() const { return static_cast<Index>(weights.size()); }
};

/// Rule of at least the requested polynomial degree on a dim-simplex
/// (dim = 2 triangles, dim = 3 tetrahedra). Degrees <= 2 use the classic
/// positive-weight rules; higher degrees use Grundmann-Moller cones,
/// which carry some negative weights but are exact by construction.
const SimplexRule& simplex_rule(int dim, int degree);

}  // namespace eafe

#endif
