#ifndef EAFE_CATALOG_HPP
#define EAFE_CATALOG_HPP

#include "eafe/coeff.hpp"

#include <string>
#include <vector>

namespace eafe {

/// A built-in problem on the unit square/cube, all-Dirichlet unless noted.
/// Problems with a manufactured solution carry the exact field and gradient;
/// layer problems have none and are meant for bound/monotonicity experiments.
struct CatalogProblem {
  std::string name;
  std::string description;
  int dim = 2;
  CoefficientSet coeffs;
  bool has_exact = false;
  ScalarField exact;
  VectorField exact_grad;
};

const std::vector<CatalogProblem>& problem_catalog();
const CatalogProblem* find_problem(const std::string& name);
std::vector<std::string> problem_names();

/// Manufactured source f = -div(D grad u + b u) + gamma u for constant
/// (D, b, gamma) and u = prod_i sin(pi x_i). Used by the catalog entries.
ScalarField manufactured_sine_source(Matrix D, Vector b, Real gamma);
ScalarField sine_product_solution(int dim);
VectorField sine_product_gradient(int dim);

}  // namespace eafe

#endif
