#include "eafe/analysis.hpp"

#include "eafe/quadrature.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>

namespace eafe {

MonotonicityReport monotonicity_audit(const SimplicialMesh& mesh, const TensorField& D,
                                      int omega_quad_degree, const ScalarField& alpha) {
  MonotonicityReport report;
  report.edges = edge_list(mesh);

  std::map<std::pair<Index, Index>, std::size_t> edge_index;
  for (std::size_t e = 0; e < report.edges.size(); ++e)
    edge_index[{report.edges[e].a, report.edges[e].b}] = e;
  report.edge_sums.assign(report.edges.size(), 0.0);

  Real max_abs_omega = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const ElementGeometry geom = element_geometry(mesh, c);
    const std::vector<Real> omega = edge_weight_omega(geom, D, omega_quad_degree, alpha);
    for (std::size_t e = 0; e < geom.edges.size(); ++e) {
      Index a = geom.vertex_ids[static_cast<std::size_t>(geom.edges[e].i)];
      Index b = geom.vertex_ids[static_cast<std::size_t>(geom.edges[e].j)];
      if (a > b) std::swap(a, b);
      report.edge_sums[edge_index.at({a, b})] += omega[e];
      max_abs_omega = std::max(max_abs_omega, std::abs(omega[e]));
    }
  }

  report.tolerance = 1e-12 * max_abs_omega;
  report.min_sum = report.edge_sums.empty() ? 0.0
                                            : *std::min_element(report.edge_sums.begin(),
                                                                report.edge_sums.end());
  for (std::size_t e = 0; e < report.edge_sums.size(); ++e)
    if (report.edge_sums[e] < -report.tolerance) report.violators.push_back(static_cast<Index>(e));
  report.ok = report.violators.empty();
  return report;
}

MonotonicityReport monotonicity_audit_with_matrix(const SimplicialMesh& mesh,
                                                  const TensorField& D, const Vector& beta_check,
                                                  int omega_quad_degree) {
  MonotonicityReport report = monotonicity_audit(mesh, D, omega_quad_degree);

  TensorField Dcopy = D;
  CoefficientSet coeffs = make_coefficients(
      mesh.dim, Dcopy,
      [Dcopy, beta_check](const Point& x) { return Vector(Dcopy(x) * beta_check); },
      {}, {});
  SimplicialMesh dirichlet_mesh = retag_boundary(
      mesh, [](const Point&, const Vector&) { return BoundaryTag::Dirichlet; });
  AssemblyOptions aopts;
  aopts.scheme.omega_quad_degree = omega_quad_degree;
  const SparseSystem sys = assemble(dirichlet_mesh, coeffs, aopts);
  auto [A, rhs] = sys.eliminated();
  report.matrix_check = mmatrix_check(A);
  return report;
}

DmpResult dmp_experiment(const SimplicialMesh& mesh, const CoefficientSet& coeffs,
                         const std::function<Real(Index, const Point&)>& boundary_values,
                         Real lo, Real hi, const AssemblyOptions& aopts,
                         const SolverOptions& sopts) {
  CoefficientSet homogeneous = coeffs;
  homogeneous.f = [](const Point&) { return 0.0; };

  AssemblyOptions options = aopts;
  options.dirichlet_values = boundary_values;

  DmpResult result;
  result.guaranteed =
      monotonicity_audit(mesh, coeffs.D, aopts.scheme.omega_quad_degree, coeffs.alpha).ok;

  const SparseSystem sys = assemble(mesh, homogeneous, options);
  auto [A, rhs] = sys.eliminated();
  auto [u, report] = solve(A, rhs, sopts);
  if (!report.converged) throw Error("dmp_experiment: solver did not converge");
  result.solve = report;
  result.min_u = u.minCoeff();
  result.max_u = u.maxCoeff();
  result.tolerance = 1e-10 * (hi - lo + 1.0);
  result.pass = result.min_u >= lo - result.tolerance && result.max_u <= hi + result.tolerance;
  return result;
}

namespace {

// Both sides of the expansion identity; LHS uses the exact integral of the
// edge basis, int_T phi_E = |T|/(dim+1) (grad lambda_i - grad lambda_j) for
// phi_E with unit circulation along tau_E = q_i - q_j.
std::pair<Real, Real> nedelec_sides(const ElementGeometry& geom, const Matrix& D, const Vector& J,
                                    const VectorX& v_local) {
  const int dim = geom.dim;
  Vector grad_v = Vector::Zero(dim);
  for (int k = 0; k <= dim; ++k) grad_v += v_local(k) * geom.grad_lambda.col(k);

  Real lhs = 0.0, rhs = 0.0;
  const std::vector<Real> omega = edge_weight_omega(
      geom, [&D](const Point&) { return D; }, 1);
  for (std::size_t e = 0; e < geom.edges.size(); ++e) {
    const auto& edge = geom.edges[e];
    const Real jt = J.dot(edge.tau);
    const Vector int_phi = (geom.measure / (dim + 1)) *
                           (geom.grad_lambda.col(edge.i) - geom.grad_lambda.col(edge.j));
    lhs += jt * int_phi.dot(D * grad_v);
    rhs += omega[e] * jt * (v_local(edge.i) - v_local(edge.j));
  }
  return {lhs, rhs};
}

}  // namespace

Real nedelec_identity_residual(const ElementGeometry& geom, const Matrix& D, const Vector& J,
                               const VectorX& v_local) {
  auto [lhs, rhs] = nedelec_sides(geom, D, J, v_local);
  return std::abs(lhs - rhs);
}

Real nedelec_identity_scale(const ElementGeometry& geom, const Matrix& D, const Vector& J,
                            const VectorX& v_local) {
  auto [lhs, rhs] = nedelec_sides(geom, D, J, v_local);
  return std::max(std::abs(lhs), std::abs(rhs));
}

ErrorNorms error_norms(const SimplicialMesh& mesh, const VectorX& u_h, const ScalarField& u,
                       const VectorField& grad_u, int quad_degree) {
  const int dim = mesh.dim;
  const SimplexRule& rule = simplex_rule(dim, quad_degree);
  const VectorX u_i = interpolate(mesh, u);

  Real l2 = 0.0, h1s = 0.0, il2 = 0.0, ih1s = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const ElementGeometry geom = element_geometry(mesh, c);

    Vector grad_uh = Vector::Zero(dim);
    Vector grad_ui = Vector::Zero(dim);
    for (int k = 0; k <= dim; ++k) {
      grad_uh += u_h(geom.vertex_ids[static_cast<std::size_t>(k)]) * geom.grad_lambda.col(k);
      grad_ui += u_i(geom.vertex_ids[static_cast<std::size_t>(k)]) * geom.grad_lambda.col(k);
    }

    for (Index q = 0; q < rule.size(); ++q) {
      Point x = Point::Zero(dim);
      Real uh_q = 0.0, ui_q = 0.0;
      for (int k = 0; k <= dim; ++k) {
        x += rule.barycentric(q, k) * geom.corners.col(k);
        uh_q += rule.barycentric(q, k) * u_h(geom.vertex_ids[static_cast<std::size_t>(k)]);
        ui_q += rule.barycentric(q, k) * u_i(geom.vertex_ids[static_cast<std::size_t>(k)]);
      }
      const Real w = rule.weights[static_cast<std::size_t>(q)] * geom.measure;
      const Real e_q = u(x) - uh_q;
      const Vector ge_q = grad_u(x) - grad_uh;
      l2 += w * e_q * e_q;
      h1s += w * ge_q.squaredNorm();
      const Real ie_q = ui_q - uh_q;
      il2 += w * ie_q * ie_q;
      ih1s += w * (grad_ui - grad_uh).squaredNorm();
    }
  }

  ErrorNorms norms;
  norms.l2 = std::sqrt(std::max(l2, 0.0));
  norms.h1_semi = std::sqrt(std::max(h1s, 0.0));
  norms.h1 = std::sqrt(std::max(l2 + h1s, 0.0));
  norms.interp_l2 = std::sqrt(std::max(il2, 0.0));
  norms.interp_h1_semi = std::sqrt(std::max(ih1s, 0.0));
  norms.interp_h1 = std::sqrt(std::max(il2 + ih1s, 0.0));
  return norms;
}

std::optional<Real> ConvergenceStudy::final_interp_h1_rate() const {
  if (records.size() < 2) return std::nullopt;
  const auto& a = records[records.size() - 2];
  const auto& b = records.back();
  if (!(a.err_interp_h1 > 0) || !(b.err_interp_h1 > 0)) return std::nullopt;
  return std::log2(a.err_interp_h1 / b.err_interp_h1);
}

ConvergenceStudy convergence_study(const StudyProblem& problem, int levels, int n0,
                                   const AssemblyOptions& aopts, const SolverOptions& sopts,
                                   int error_quad_degree) {
  ConvergenceStudy study;
  int n = n0;
  for (int level = 0; level < levels; ++level, n *= 2) {
    try {
      const SimplicialMesh mesh = generate_structured(problem.dim, n);
      const SparseSystem sys = assemble(mesh, problem.coeffs, aopts);
      auto [A, rhs] = sys.eliminated();
      auto [u_h, report] = solve(A, rhs, sopts);
      if (!report.converged)
        throw Error("solver did not converge at level " + std::to_string(level) +
                    " (residual " + std::to_string(report.residual) + ")");

      ConvergenceRecord rec;
      rec.level = level;
      rec.h = max_element_diameter(mesh);
      rec.dofs = mesh.num_vertices();
      const ErrorNorms norms =
          error_norms(mesh, u_h, problem.exact, problem.exact_grad, error_quad_degree);
      rec.err_l2 = norms.l2;
      rec.err_h1_semi = norms.h1_semi;
      rec.err_h1 = norms.h1;
      rec.err_interp_h1 = norms.interp_h1;
      if (!study.records.empty()) {
        const auto& prev = study.records.back();
        if (prev.err_l2 > 0 && rec.err_l2 > 0) rec.rate_l2 = std::log2(prev.err_l2 / rec.err_l2);
        if (prev.err_h1 > 0 && rec.err_h1 > 0) rec.rate_h1 = std::log2(prev.err_h1 / rec.err_h1);
      }
      study.records.push_back(rec);
    } catch (const std::exception& e) {
      study.error = e.what();
      return study;
    }
  }
  study.completed = true;
  return study;
}

namespace {

std::string csv_real(Real x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_csv(const std::vector<ConvergenceRecord>& records, std::ostream& out) {
  out << "level,h,dofs,err_l2,err_h1_semi,err_h1,err_interp_h1,rate_l2,rate_h1\n";
  for (const auto& r : records) {
    out << r.level << ',' << csv_real(r.h) << ',' << r.dofs << ',' << csv_real(r.err_l2) << ','
        << csv_real(r.err_h1_semi) << ',' << csv_real(r.err_h1) << ',' << csv_real(r.err_interp_h1)
        << ',' << (r.rate_l2 ? csv_real(*r.rate_l2) : "") << ','
        << (r.rate_h1 ? csv_real(*r.rate_h1) : "") << '\n';
  }
}

}  // namespace eafe
