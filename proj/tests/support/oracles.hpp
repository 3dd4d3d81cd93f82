// Test-only oracles, deliberately independent of the library's kernels:
// gradients via explicit perpendicular/cross-product formulas, the P1 mass
// matrix in closed form, and a Thomas tridiagonal solver.
#ifndef EAFE_TESTS_ORACLES_HPP
#define EAFE_TESTS_ORACLES_HPP

#include "eafe/mesh.hpp"
#include "eafe/types.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace eafe::testing {

// Barycentric gradients from the classic geometric formulas: in 2D the
// gradient of lambda_k is the rotated opposite edge over twice the area; in
// 3D it is the scaled normal of the opposite face.
inline MatrixX oracle_gradients(const SimplicialMesh& mesh, Index cell, Real* measure_out) {
  const int dim = mesh.dim;
  MatrixX grads(dim, dim + 1);
  if (dim == 2) {
    Eigen::Vector2d q[3];
    for (int k = 0; k < 3; ++k) q[k] = mesh.vertex(mesh.cells(cell, k));
    const Real twice_area = (q[1] - q[0]).x() * (q[2] - q[0]).y() -
                            (q[1] - q[0]).y() * (q[2] - q[0]).x();
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d opposite = q[(k + 2) % 3] - q[(k + 1) % 3];
      grads(0, k) = -opposite.y() / twice_area;
      grads(1, k) = opposite.x() / twice_area;
    }
    if (measure_out) *measure_out = std::abs(twice_area) / 2.0;
  } else {
    Eigen::Vector3d q[4];
    for (int k = 0; k < 4; ++k) q[k] = mesh.vertex(mesh.cells(cell, k));
    const Real six_vol = (q[1] - q[0]).cross(q[2] - q[0]).dot(q[3] - q[0]);
    for (int k = 0; k < 4; ++k) {
      // Opposite face spanned by the other three vertices, oriented so the
      // gradient points toward q[k].
      const int a = (k + 1) % 4, b = (k + 2) % 4, c = (k + 3) % 4;
      Eigen::Vector3d n = (q[b] - q[a]).cross(q[c] - q[a]);
      if (n.dot(q[k] - q[a]) < 0) n = -n;
      grads.col(k) = n / std::abs(six_vol);
    }
    if (measure_out) *measure_out = std::abs(six_vol) / 6.0;
  }
  return grads;
}

// Standard P1 stiffness + consistent mass (exact formulas), all-Dirichlet
// boundary ignored: returns the raw operator as a dense matrix.
inline MatrixX oracle_galerkin_matrix(const SimplicialMesh& mesh, const Matrix& D, Real gamma) {
  const Index n = mesh.num_vertices();
  const int nv = mesh.dim + 1;
  MatrixX A = MatrixX::Zero(n, n);
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    Real measure = 0.0;
    const MatrixX g = oracle_gradients(mesh, c, &measure);
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j) {
        const Real stiff = measure * g.col(i).dot(MatrixX(D) * g.col(j));
        const Real mass = gamma * measure * ((i == j) ? 2.0 : 1.0) / ((nv) * (nv + 1));
        A(mesh.cells(c, i), mesh.cells(c, j)) += stiff + mass;
      }
  }
  return A;
}

inline VectorX thomas_solve(const VectorX& lower, const VectorX& diag, const VectorX& upper,
                            VectorX rhs) {
  const Index n = diag.size();
  VectorX d = diag, x(n);
  for (Index i = 1; i < n; ++i) {
    const Real m = lower(i) / d(i - 1);
    d(i) -= m * upper(i - 1);
    rhs(i) -= m * rhs(i - 1);
  }
  x(n - 1) = rhs(n - 1) / d(n - 1);
  for (Index i = n - 2; i >= 0; --i) x(i) = (rhs(i) - upper(i) * x(i + 1)) / d(i);
  return x;
}

inline Matrix random_spd(int dim, std::mt19937& rng) {
  std::uniform_real_distribution<Real> dist(-1.0, 1.0);
  Matrix A(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) A(i, j) = dist(rng);
  Matrix D = A * A.transpose();
  D += 0.3 * Matrix::Identity(dim, dim);
  return D;
}

// Random nondegenerate simplex with corners in [0,1]^dim.
inline std::vector<Point> random_simplex(int dim, std::mt19937& rng) {
  std::uniform_real_distribution<Real> dist(0.0, 1.0);
  while (true) {
    std::vector<Point> corners;
    for (int k = 0; k <= dim; ++k) {
      Point p(dim);
      for (int c = 0; c < dim; ++c) p(c) = dist(rng);
      corners.push_back(p);
    }
    MatrixX edges(dim, dim);
    for (int k = 0; k < dim; ++k) edges.col(k) = corners[static_cast<std::size_t>(k) + 1] - corners[0];
    if (std::abs(edges.determinant()) > 5e-2) return corners;
  }
}

}  // namespace eafe::testing

#endif
