#ifndef EAFE_ASSEMBLY_HPP
#define EAFE_ASSEMBLY_HPP

#include "eafe/coeff.hpp"
#include "eafe/mesh.hpp"
#include "eafe/types.hpp"

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace eafe {

/// Bernoulli function B(t) = t / (e^t - 1), the closed-form exponential
/// edge weight for edge-constant beta. Total and overflow safe: B(t) -> -t
/// for large negative t and B(t) ~ t e^{-t} (underflowing to 0) for large
/// positive t. Satisfies B(-t) = B(t) e^t, so B(-t) - B(t) = t.
template <typename T>
T bernoulli(T t) {
  if (std::abs(t) < T(1e-4)) {
    const T t2 = t * t;
    return T(1) - t / T(2) + t2 / T(12) - t2 * t2 / T(720);
  }
  if (t > T(700)) return t * std::exp(-t);
  return t / std::expm1(t);
}

struct SchemeOptions {
  int edge_quad_points = 4;   // Gauss points for psi and the harmonic average
  int mass_quad_degree = 2;   // simplex rule degree for the gamma and f terms
  int omega_quad_degree = 1;  // simplex rule degree for variable-D edge weights
  enum class BetaMode { Auto, Constant, Quadrature };
  BetaMode beta_mode = BetaMode::Auto;  // Auto honors the coefficient flags
};

/// Exponential data of one oriented edge from q_from to q_to:
///   dpsi        = psi(q_to) - psi(q_from),  psi' = (beta . tau)/|tau| along the edge,
///   harm_gauged = harmonic average of e^psi in the gauge psi(q_from) = 0,
///   coef_to     = harm_gauged * e^{dpsi}   (computed overflow-safely),
///   coef_from   = harm_gauged.
/// The pair (coef_to, coef_from) is invariant under constant shifts of psi;
/// internally all exponentials are max-shifted, so |psi| up to ~1e3 is safe.
struct EdgeExponentials {
  Real dpsi = 0.0;
  Real harm_gauged = 1.0;
  Real coef_to = 1.0;
  Real coef_from = 1.0;
};

EdgeExponentials edge_exponential_data(const Point& q_from, const Point& q_to,
                                       const VectorField& beta_field, int quad_points,
                                       Real gauge_shift = 0.0);

/// Closed form of the above for edge-constant beta: t = beta . (q_to - q_from)
/// gives (dpsi, harm) = (t, B(t)) and coefficient pair (B(-t), B(t)).
EdgeExponentials edge_exponential_data_constant(Real t);

/// Per-(element, edge) record used by the local matrix: the stiffness edge
/// weight omega, the potential increment and gauged harmonic average, and the
/// invariant coefficient pair. Local indices follow the global ascending
/// orientation: i is the endpoint with the larger global vertex id.
struct EdgeData {
  Index element = -1;
  int i = 0, j = 0;  // local vertex indices, global(i) > global(j)
  Real omega = 0.0;
  Real dpsi = 0.0;
  Real harm_gauged = 1.0;
  Real coef_i = 1.0;  // harm_gauged * e^{dpsi}
  Real coef_j = 1.0;  // harm_gauged
};

/// Edge stiffness weights omega_E(D) = -int_T D grad(lambda_i) . grad(lambda_j)
/// for every local edge, ordered like geom.edges. Exact for constant D at any
/// quadrature degree; variable D is integrated with a simplex rule of the
/// given degree. When the coefficient set carries an alpha field the weight is
/// (element average of alpha) * omega_E(D / alpha).
std::vector<Real> edge_weight_omega(const ElementGeometry& geom, const TensorField& D,
                                    int quad_degree, const ScalarField& alpha = {});

/// Full per-edge data for one element (weights plus exponential data).
std::vector<EdgeData> element_edge_data(
    const ElementGeometry& geom, const CoefficientSet& coeffs, const SchemeOptions& scheme,
    const std::function<Real(Index, Index)>& edge_gauge_shift = {});

/// Local convection-diffusion matrix
///   A_loc(v_i, u_j) realizing  sum_E omega_E harm_E delta_E(e^psi u) delta_E(v).
/// The reaction (gamma) and boundary terms are handled by assemble().
LocalMatrix local_eafe_matrix(const ElementGeometry& geom, const CoefficientSet& coeffs,
                              const SchemeOptions& scheme);

/// Assembled linear system with Dirichlet bookkeeping kept separate:
/// `triplets`/`rhs` hold the raw (pre-elimination) operator, and
/// eliminated() applies the boundary values by substitution, leaving
/// identity rows on constrained vertices. n is one DOF per mesh vertex.
struct SparseSystem {
  Index n = 0;
  std::vector<Triplet> triplets;
  VectorX rhs;
  std::vector<bool> dirichlet_mask;
  VectorX dirichlet_values;

  CompressedMatrix matrix() const;  // pre-elimination
  std::pair<CompressedMatrix, VectorX> eliminated() const;
};

struct AssemblyOptions {
  SchemeOptions scheme;
  /// Dirichlet data by vertex id and position; empty means homogeneous.
  std::function<Real(Index, const Point&)> dirichlet_values;
  /// Test hook: additive psi gauge shift per global edge (a < b). The
  /// assembled matrix must not depend on it.
  std::function<Real(Index, Index)> edge_gauge_shift;
  /// Kept for the CLI contract; assembly is sequential and deterministic
  /// either way.
  bool deterministic = true;
};

/// Global system: EAFE stiffness + reaction mass + outflow boundary term on
/// the matrix; source and inflow data g on the right-hand side. Kernel errors
/// are rethrown with element/face provenance.
SparseSystem assemble(const SimplicialMesh& mesh, const CoefficientSet& coeffs,
                      const AssemblyOptions& options = {});

/// Nodal interpolant: u_I(vertex) = u(vertex).
VectorX interpolate(const SimplicialMesh& mesh, const ScalarField& u);

}  // namespace eafe

#endif
