#include "eafe/catalog.hpp"

#include <cmath>
#include <numbers>

namespace eafe {

namespace {

constexpr Real kPi = std::numbers::pi;

}  // namespace

ScalarField sine_product_solution(int dim) {
  return [dim](const Point& x) {
    Real u = 1.0;
    for (int c = 0; c < dim; ++c) u *= std::sin(kPi * x(c));
    return u;
  };
}

VectorField sine_product_gradient(int dim) {
  return [dim](const Point& x) {
    Vector g(dim);
    for (int c = 0; c < dim; ++c) {
      Real v = kPi * std::cos(kPi * x(c));
      for (int o = 0; o < dim; ++o)
        if (o != c) v *= std::sin(kPi * x(o));
      g(c) = v;
    }
    return g;
  };
}

ScalarField manufactured_sine_source(Matrix D, Vector b, Real gamma) {
  const int dim = static_cast<int>(b.size());
  // With u = prod sin(pi x_i) and constant coefficients:
  //   -D : hess(u) = pi^2 (sum_i D_ii) u - pi^2 sum_{i != j} D_ij prod_k t_k,
  // where t_k = cos(pi x_k) for k in {i, j} and sin otherwise,
  //   -b . grad(u) = -pi sum_i b_i cos(pi x_i) prod_{k != i} sin(pi x_k).
  return [D, b, gamma, dim](const Point& x) {
    Real sins[3], coss[3];
    for (int c = 0; c < dim; ++c) {
      sins[c] = std::sin(kPi * x(c));
      coss[c] = std::cos(kPi * x(c));
    }
    Real u = 1.0;
    for (int c = 0; c < dim; ++c) u *= sins[c];

    Real f = gamma * u;
    for (int i = 0; i < dim; ++i) f += kPi * kPi * D(i, i) * u;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        if (i == j) continue;
        Real term = 1.0;
        for (int k = 0; k < dim; ++k) term *= (k == i || k == j) ? coss[k] : sins[k];
        f -= kPi * kPi * D(i, j) * term;
      }
    for (int i = 0; i < dim; ++i) {
      Real term = coss[i];
      for (int k = 0; k < dim; ++k)
        if (k != i) term *= sins[k];
      f -= kPi * b(i) * term;
    }
    return f;
  };
}

namespace {

CatalogProblem manufactured_problem(std::string name, std::string description, int dim,
                                    Matrix D, Vector b, Real gamma) {
  CatalogProblem p;
  p.name = std::move(name);
  p.description = std::move(description);
  p.dim = dim;
  p.coeffs = make_constant_coefficients(D, b, gamma, manufactured_sine_source(D, b, gamma));
  p.has_exact = true;
  p.exact = sine_product_solution(dim);
  p.exact_grad = sine_product_gradient(dim);
  return p;
}

std::vector<CatalogProblem> build_catalog() {
  std::vector<CatalogProblem> problems;

  problems.push_back(manufactured_problem(
      "poisson2d", "pure diffusion, D = I, u = sin(pi x) sin(pi y)", 2,
      Matrix::Identity(2, 2), Vector::Zero(2), 0.0));

  {
    Vector b(2);
    b << 2.0, 1.0;
    problems.push_back(manufactured_problem(
        "eafe2d_constant", "D = I with constant convection b = (2, 1), gamma = 1", 2,
        Matrix::Identity(2, 2), b, 1.0));
  }

  {
    Matrix D(2, 2);
    D << 2.0, 0.5, 0.5, 1.0;
    Vector b(2);
    b << 2.0, 1.0;
    problems.push_back(manufactured_problem(
        "eafe2d_tensor", "full SPD tensor D = [[2, .5], [.5, 1]], b = (2, 1), gamma = 1", 2, D, b,
        1.0));
  }

  {
    const Real eps = 1e-6;
    Vector b(2);
    b << 1.0, 0.0;
    CatalogProblem p;
    p.name = "layer2d";
    p.description = "boundary layer: D = 1e-6 I, b = (1, 0), f = 1, no exact solution";
    p.dim = 2;
    p.coeffs = make_constant_coefficients(eps * Matrix::Identity(2, 2), b, 0.0,
                                          [](const Point&) { return 1.0; });
    p.has_exact = false;
    problems.push_back(p);
  }

  {
    // Dispersion tensor at the fixed velocity b = (0.8, 0.6); |b| = 1 makes
    // the longitudinal/transverse eigenvalues k_d + k_t and k_d + k_l.
    const DispersionParams params{1e-4, 21.0, 2.1};
    Vector b(2);
    b << 0.8, 0.6;
    const Matrix D = dispersion_tensor(params, b);
    problems.push_back(manufactured_problem(
        "dispersion2d", "dispersion tensor D(k_d = 1e-4, k_t = 21, k_l = 2.1), b = (0.8, 0.6)", 2,
        D, b, 0.0));
  }

  problems.push_back(manufactured_problem(
      "poisson3d", "pure diffusion in 3D, u = sin(pi x) sin(pi y) sin(pi z)", 3,
      Matrix::Identity(3, 3), Vector::Zero(3), 0.0));

  {
    Matrix D(3, 3);
    D << 2.0, 0.5, 0.0,
         0.5, 1.0, 0.3,
         0.0, 0.3, 1.5;
    Vector b(3);
    b << 1.0, 1.0, 1.0;
    problems.push_back(manufactured_problem(
        "eafe3d_tensor", "full SPD 3x3 tensor with b = (1, 1, 1), gamma = 1", 3, D, b, 1.0));
  }

  return problems;
}

}  // namespace

const std::vector<CatalogProblem>& problem_catalog() {
  static const std::vector<CatalogProblem> catalog = build_catalog();
  return catalog;
}

const CatalogProblem* find_problem(const std::string& name) {
  for (const auto& p : problem_catalog())
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<std::string> problem_names() {
  std::vector<std::string> names;
  for (const auto& p : problem_catalog()) names.push_back(p.name);
  return names;
}

}  // namespace eafe
