// Acceptance suite: one numbered criterion per run (or all without
// arguments), one pass/fail line each, nonzero exit on any failure.

#include "eafe/analysis.hpp"
#include "eafe/catalog.hpp"
#include "eafe/config.hpp"

#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace eafe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool entrywise_close(const MatrixX& A, const MatrixX& B, Real rel_tol, Real* worst = nullptr) {
  const Real floor = 1e-14 * std::max(A.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff());
  Real worst_seen = 0.0;
  bool ok = true;
  for (Index r = 0; r < A.rows(); ++r)
    for (Index c = 0; c < A.cols(); ++c) {
      const Real diff = std::abs(A(r, c) - B(r, c));
      const Real scale = std::max(std::abs(A(r, c)), std::abs(B(r, c)));
      if (diff > rel_tol * scale + floor) ok = false;
      if (scale > 0) worst_seen = std::max(worst_seen, diff / std::max(scale, floor));
    }
  if (worst) *worst = worst_seen;
  return ok;
}

// --- criterion 1: Galerkin reduction for b = 0 ------------------------------

Outcome criterion_galerkin_reduction() {
  Real worst = 0.0;
  bool ok = true;
  for (int dim : {2, 3}) {
    const SimplicialMesh mesh = generate_structured(dim, dim == 2 ? 8 : 4);
    Matrix D;
    if (dim == 2) {
      D.resize(2, 2);
      D << 2.0, 0.5, 0.5, 1.0;
    } else {
      D.resize(3, 3);
      D << 2.0, 0.5, 0.0, 0.5, 1.0, 0.3, 0.0, 0.3, 1.5;
    }
    const CoefficientSet coeffs = make_constant_coefficients(D, Vector::Zero(dim), 1.0, {});
    const MatrixX A = MatrixX(assemble(mesh, coeffs, {}).matrix());
    const MatrixX oracle = eafe::testing::oracle_galerkin_matrix(mesh, D, 1.0);
    Real w = 0.0;
    ok = entrywise_close(A, oracle, 1e-12, &w) && ok;
    worst = std::max(worst, w);
  }
  return {ok, "max entrywise rel diff " + std::to_string(worst)};
}

// --- criterion 2: Bernoulli / Scharfetter-Gummel oracle ----------------------

long double bernoulli_oracle(long double t) {
  if (t == 0.0L) return 1.0L;
  return t / expm1l(t);  // |t| stays moderate here
}

Outcome criterion_bernoulli_oracle() {
  std::mt19937 rng(90210);
  std::uniform_real_distribution<Real> unit(0.2, 3.0);
  std::uniform_real_distribution<Real> vel(-5.0, 5.0);
  Real worst = 0.0;
  bool ok = true;

  for (int dim : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto corners = eafe::testing::random_simplex(dim, rng);
      const ElementGeometry geom = element_geometry_from_points(dim, corners);

      Matrix D = Matrix::Zero(dim, dim);
      for (int c = 0; c < dim; ++c) D(c, c) = unit(rng);
      Vector beta_vec(dim);
      for (int c = 0; c < dim; ++c) beta_vec(c) = vel(rng);

      // Library path: b = D beta, constant-coefficient fast path.
      const CoefficientSet coeffs =
          make_constant_coefficients(D, Vector(D * beta_vec), 0.0, {});
      const LocalMatrix A = local_eafe_matrix(geom, coeffs, {});

      // Independent script: geometric-formula gradients and long-double
      // Bernoulli weights, B(+-beta.tau) on every edge (a < b local).
      MatrixX verts(dim + 1, dim);
      for (int k = 0; k <= dim; ++k)
        for (int c = 0; c < dim; ++c) verts(k, c) = corners[static_cast<std::size_t>(k)](c);
      Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> cell(1, dim + 1);
      for (int k = 0; k <= dim; ++k) cell(0, k) = k;
      SimplicialMesh shim;
      shim.dim = dim;
      shim.vertices = verts;
      shim.cells = cell;
      Real measure = 0.0;
      const MatrixX grads = eafe::testing::oracle_gradients(shim, 0, &measure);

      MatrixX expected = MatrixX::Zero(dim + 1, dim + 1);
      for (int a = 0; a <= dim; ++a)
        for (int b = a + 1; b <= dim; ++b) {
          const Real omega = -measure * grads.col(a).dot(MatrixX(D) * grads.col(b));
          const long double t =
              static_cast<long double>(beta_vec.dot(Vector(corners[static_cast<std::size_t>(b)] -
                                                           corners[static_cast<std::size_t>(a)])));
          const Real bp = static_cast<Real>(bernoulli_oracle(t));
          const Real bm = static_cast<Real>(bernoulli_oracle(-t));
          expected(a, a) += omega * bp;
          expected(b, b) += omega * bm;
          expected(a, b) -= omega * bm;
          expected(b, a) -= omega * bp;
        }

      Real w = 0.0;
      ok = entrywise_close(MatrixX(A), expected, 1e-12, &w) && ok;
      worst = std::max(worst, w);
    }
  }
  return {ok, "max entrywise rel diff " + std::to_string(worst) + " over 100 draws per dim"};
}

// --- criterion 3: constant-flux expansion identity ---------------------------

Outcome criterion_nedelec_identity() {
  std::mt19937 rng(31337);
  std::uniform_real_distribution<Real> dist(-2.0, 2.0);
  Real worst = 0.0;
  for (int dim : {2, 3}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const auto corners = eafe::testing::random_simplex(dim, rng);
      const ElementGeometry geom = element_geometry_from_points(dim, corners);
      const Matrix D = eafe::testing::random_spd(dim, rng);
      Vector J(dim);
      for (int c = 0; c < dim; ++c) J(c) = dist(rng);
      VectorX v(dim + 1);
      for (int c = 0; c <= dim; ++c) v(c) = dist(rng);
      const Real scale = std::max(nedelec_identity_scale(geom, D, J, v), Real(1e-30));
      worst = std::max(worst, nedelec_identity_residual(geom, D, J, v) / scale);
    }
  }
  return {worst <= 1e-12, "max relative residual " + std::to_string(worst)};
}

// --- criterion 4: first-order convergence ------------------------------------

Outcome criterion_convergence() {
  const CatalogProblem* p2 = find_problem("eafe2d_tensor");
  SolverOptions sopts;
  sopts.tol = 1e-11;
  sopts.preconditioner = Preconditioner::ILU0;
  sopts.max_iter = 20000;

  const ConvergenceStudy study2 =
      convergence_study({p2->coeffs, p2->exact, p2->exact_grad, 2}, 4, 8, {}, sopts);
  if (!study2.completed) return {false, "2D study failed: " + study2.error};
  const auto rate2 = study2.final_interp_h1_rate();
  bool l2_monotone = true;
  for (std::size_t k = 1; k < study2.records.size(); ++k)
    l2_monotone = l2_monotone && study2.records[k].err_l2 < study2.records[k - 1].err_l2;

  const CatalogProblem* p3 = find_problem("eafe3d_tensor");
  const ConvergenceStudy study3 =
      convergence_study({p3->coeffs, p3->exact, p3->exact_grad, 3}, 3, 4, {}, sopts);
  if (!study3.completed) return {false, "3D study failed: " + study3.error};
  const auto rate3 = study3.final_interp_h1_rate();

  const bool ok = rate2 && *rate2 >= 0.9 && l2_monotone && rate3 && *rate3 >= 0.8;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "2D interp-H1 rate %.3f (>= 0.9), L2 monotone %s, 3D rate %.3f (>= 0.8)",
                rate2 ? *rate2 : -1.0, l2_monotone ? "yes" : "no", rate3 ? *rate3 : -1.0);
  return {ok, buf};
}

// --- criterion 5: monotonicity and the M-matrix cross check ------------------

Outcome criterion_monotonicity() {
  const SimplicialMesh mesh = generate_structured(2, 8);
  const TensorField eye = [](const Point&) { return Matrix(Matrix::Identity(2, 2)); };
  const MonotonicityReport audit = monotonicity_audit(mesh, eye);

  Vector b(2);
  b << 20.0, 0.0;  // beta = b for D = I
  const CoefficientSet coeffs = make_constant_coefficients(Matrix::Identity(2, 2), b, 0.0, {});
  auto [A, rhs] = assemble(mesh, coeffs, {}).eliminated();
  const MMatrixReport check = mmatrix_check(A);

  MatrixX ov(3, 2);
  ov << 0.0, 0.0, 4.0, 0.0, 2.0, 0.2;
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> oc(1, 3);
  oc << 0, 1, 2;
  std::vector<BoundaryFace> of = {BoundaryFace{{0, 1, -1}, BoundaryTag::Dirichlet},
                                  BoundaryFace{{1, 2, -1}, BoundaryTag::Dirichlet},
                                  BoundaryFace{{0, 2, -1}, BoundaryTag::Dirichlet}};
  const SimplicialMesh obtuse = make_mesh(2, ov, oc, of);
  const MonotonicityReport obtuse_audit = monotonicity_audit(obtuse, eye);

  const bool ok = audit.ok && check.sign_ok && check.inverse_nonnegative.has_value() &&
                  *check.inverse_nonnegative && !obtuse_audit.ok;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "audit %s, sign %s, inverse >= 0 %s (n = %d), obtuse audit fails %s (min sum %.4f)",
                audit.ok ? "ok" : "VIOLATED", check.sign_ok ? "ok" : "BAD",
                check.inverse_nonnegative.value_or(false) ? "yes" : "no", static_cast<int>(A.rows()),
                !obtuse_audit.ok ? "yes" : "NO", obtuse_audit.min_sum);
  return {ok, buf};
}

// --- criterion 6: discrete maximum principle ---------------------------------

Outcome criterion_dmp() {
  const SimplicialMesh mesh = generate_structured(2, 8);
  Vector b(2);
  b << 10.0, 5.0;
  const CoefficientSet coeffs = make_constant_coefficients(Matrix::Identity(2, 2), b, 0.0, {});
  std::mt19937 rng(60601);
  std::uniform_real_distribution<Real> dist(0.0, 1.0);

  Real global_min = 1.0, global_max = 0.0;
  SolverOptions sopts;
  sopts.tol = 1e-12;
  for (int trial = 0; trial < 20; ++trial) {
    VectorX values(mesh.num_vertices());
    for (Index v = 0; v < values.size(); ++v) values(v) = dist(rng);
    const DmpResult r = dmp_experiment(
        mesh, coeffs, [&values](Index v, const Point&) { return values(v); }, 0.0, 1.0, {}, sopts);
    if (!r.guaranteed) return {false, "structured mesh unexpectedly failed the audit"};
    global_min = std::min(global_min, r.min_u);
    global_max = std::max(global_max, r.max_u);
  }
  const bool ok = global_min >= -1e-10 && global_max <= 1.0 + 1e-10;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "range over 20 trials [%.3e, 1 + %.3e]", global_min,
                global_max - 1.0);
  return {ok, buf};
}

// --- criterion 7: singular perturbation robustness ---------------------------

Outcome criterion_layer() {
  const CatalogProblem* p = find_problem("layer2d");
  const SimplicialMesh mesh = generate_structured(2, 32);
  const MonotonicityReport audit = monotonicity_audit(mesh, p->coeffs.D);
  SolverOptions sopts;
  sopts.tol = 1e-12;
  sopts.preconditioner = Preconditioner::ILU0;
  sopts.max_iter = 50000;
  auto [A, rhs] = assemble(mesh, p->coeffs, {}).eliminated();
  auto [u, report] = solve(A, rhs, sopts);
  if (!report.converged) return {false, "solver failed: residual " + std::to_string(report.residual)};
  const bool ok = audit.ok && u.minCoeff() >= -1e-9 && u.maxCoeff() <= 1.0 + 1e-9;
  char buf[140];
  std::snprintf(buf, sizeof(buf), "min %.3e (>= -1e-9), max %.10f (<= 1 + 1e-9), %d iters",
                u.minCoeff(), u.maxCoeff(), report.iterations);
  return {ok, buf};
}

// --- criterion 8: gauge invariance -------------------------------------------

Outcome criterion_gauge() {
  const SimplicialMesh mesh = generate_structured(2, 8);
  CoefficientSet coeffs;
  coeffs.dim = 2;
  coeffs.D = [](const Point&) { return Matrix(Matrix::Identity(2, 2)); };
  coeffs.b = [](const Point& x) {
    Vector b(2);
    b << 1.0 + x(0), 2.0 - x(1);
    return b;
  };
  coeffs.gamma = [](const Point&) { return 0.0; };
  coeffs.f = [](const Point&) { return 1.0; };
  coeffs.g = [](const Point&) { return 0.0; };

  const MatrixX base = MatrixX(assemble(mesh, coeffs, {}).matrix());
  std::mt19937 rng(777);
  std::uniform_real_distribution<Real> dist(-20.0, 20.0);
  Real worst = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 10; ++trial) {
    std::map<std::pair<Index, Index>, Real> shifts;
    AssemblyOptions opts;
    opts.edge_gauge_shift = [&](Index a, Index bb) {
      auto [it, inserted] = shifts.try_emplace({a, bb}, 0.0);
      if (inserted) it->second = dist(rng);
      return it->second;
    };
    const MatrixX shifted = MatrixX(assemble(mesh, coeffs, opts).matrix());
    Real w = 0.0;
    ok = entrywise_close(base, shifted, 1e-12, &w) && ok;
    worst = std::max(worst, w);
  }
  return {ok, "max entrywise rel diff " + std::to_string(worst) + " over 10 gauges"};
}

// --- criterion 9: alpha-scaling consistency ----------------------------------

Outcome criterion_alpha() {
  const SimplicialMesh mesh = generate_structured(2, 8);
  Vector b(2);
  b << 2.0, 1.0;
  const CoefficientSet base = make_constant_coefficients(4.0 * Matrix::Identity(2, 2), b, 1.0,
                                                         [](const Point&) { return 1.0; });
  const MatrixX A = MatrixX(assemble(mesh, base, {}).matrix());
  const MatrixX As = MatrixX(assemble(mesh, alpha_scaled(base), {}).matrix());
  Real worst = 0.0;
  const bool equal_ok = entrywise_close(A, As, 1e-12, &worst);

  const CatalogProblem* p = find_problem("dispersion2d");
  StudyProblem problem{alpha_scaled(p->coeffs), p->exact, p->exact_grad, 2};
  SolverOptions sopts;
  sopts.tol = 1e-11;
  sopts.preconditioner = Preconditioner::ILU0;
  sopts.max_iter = 20000;
  const ConvergenceStudy study = convergence_study(problem, 4, 8, {}, sopts);
  if (!study.completed) return {false, "alpha-scaled dispersion study failed: " + study.error};
  const auto rate = study.final_interp_h1_rate();

  const bool ok = equal_ok && rate && *rate >= 0.9;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "D = 4I max rel diff %.2e (<= 1e-12), dispersion interp-H1 rate %.3f (>= 0.9)",
                worst, rate ? *rate : -1.0);
  return {ok, buf};
}

// --- criterion 10: dispersion inverse shortcut --------------------------------

Outcome criterion_dispersion_algebra() {
  const DispersionParams params{1e-4, 21.0, 2.1};
  std::mt19937 rng(1202);
  std::uniform_real_distribution<Real> dist(-3.0, 3.0);
  Real worst = 0.0;
  for (int dim : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      Vector b(dim);
      do {
        for (int c = 0; c < dim; ++c) b(c) = dist(rng);
      } while (b.norm() < 1e-6);
      const Matrix D = dispersion_tensor(params, b);
      const CoefficientSet coeffs = make_constant_coefficients(D, b, 0.0, {});
      const Vector computed = beta(coeffs, Point::Zero(dim));
      const Vector shortcut = b / (params.k_d + params.k_t * b.norm());
      worst = std::max(worst, (computed - shortcut).norm() / shortcut.norm());
    }
  }
  return {worst <= 1e-11, "max relative deviation " + std::to_string(worst)};
}

struct Criterion {
  int number;
  const char* title;
  Real time_limit_s;  // 0 means unbounded
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "Galerkin reduction for b = 0 (2D n=8, 3D n=4)", 5.0, criterion_galerkin_reduction},
      {2, "local matrices match the Bernoulli-weight script", 0.0, criterion_bernoulli_oracle},
      {3, "constant-flux expansion identity on random simplices", 10.0, criterion_nedelec_identity},
      {4, "first-order convergence of the full-tensor problems", 60.0, criterion_convergence},
      {5, "edge-weight audit and M-matrix cross check", 10.0, criterion_monotonicity},
      {6, "discrete maximum principle under random boundary data", 0.0, criterion_dmp},
      {7, "boundary-layer solution respects the transport bounds", 0.0, criterion_layer},
      {8, "assembly is invariant under psi gauge shifts", 0.0, criterion_gauge},
      {9, "alpha scaling: exact for scalar D, convergent for dispersion", 0.0, criterion_alpha},
      {10, "dispersion tensor inverse shortcut", 0.0, criterion_dispersion_algebra},
  };
  return all;
}

bool run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = c.run();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  const Real elapsed =
      std::chrono::duration<Real>(std::chrono::steady_clock::now() - start).count();
  bool pass = outcome.pass;
  std::string note = outcome.detail;
  if (c.time_limit_s > 0 && elapsed > c.time_limit_s) {
    pass = false;
    note += " [exceeded " + std::to_string(c.time_limit_s) + "s budget]";
  }
  std::printf("[%s] criterion %2d: %s :: %s (%.2fs)\n", pass ? "PASS" : "FAIL", c.number, c.title,
              note.c_str(), elapsed);
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  bool all_pass = true;
  if (argc > 1) {
    const int wanted = std::atoi(argv[1]);
    bool found = false;
    for (const auto& c : criteria())
      if (c.number == wanted) {
        found = true;
        all_pass = run_one(c) && all_pass;
      }
    if (!found) {
      std::fprintf(stderr, "no criterion %d\n", wanted);
      return 2;
    }
  } else {
    for (const auto& c : criteria()) all_pass = run_one(c) && all_pass;
    std::printf(all_pass ? "all criteria passed\n" : "FAILURES present\n");
  }
  return all_pass ? 0 : 1;
}
