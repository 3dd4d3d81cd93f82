// Command-line front end: solve, convergence study and mesh monotonicity
// audit for the exponentially fitted convection-diffusion scheme.
//
// Exit codes: 0 success, 1 negative verdict (check-monotone on a
// non-monotone mesh), 2 configuration error, 3 solver failure.

#include "eafe/analysis.hpp"
#include "eafe/config.hpp"
#include "eafe/vtk_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct CommonArgs {
  std::string problem;
  std::string config_path;
  std::string mesh_path;
  int n = 0;
  int dim = 0;
  std::string out;
  double tol = 0.0;
  int max_iter = 0;
  std::string deterministic;
};

void add_common_options(CLI::App* cmd, CommonArgs* args, bool with_problem = true) {
  if (with_problem)
    cmd->add_option("problem", args->problem, "catalog problem name (see 'eafe problems')");
  cmd->add_option("--config", args->config_path, "config file (INI-style)");
  cmd->add_option("--mesh", args->mesh_path, "mesh file path");
  cmd->add_option("--n", args->n, "structured mesh subdivisions per side");
  cmd->add_option("--dim", args->dim, "space dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  cmd->add_option("--out", args->out, "output path");
  cmd->add_option("--tol", args->tol, "solver relative residual tolerance");
  cmd->add_option("--max-iter", args->max_iter, "solver iteration cap");
  cmd->add_option("--deterministic", args->deterministic, "deterministic reduction (on/off)")
      ->check(CLI::IsMember({"on", "off"}));
}

eafe::RunConfig resolve(const CommonArgs& args) {
  eafe::CliOverrides o;
  if (!args.problem.empty()) o.problem = args.problem;
  if (!args.config_path.empty()) o.config_path = args.config_path;
  if (!args.mesh_path.empty()) o.mesh_path = args.mesh_path;
  if (args.n > 0) o.n = args.n;
  if (args.dim > 0) o.dim = args.dim;
  if (!args.out.empty()) o.out = args.out;
  if (args.tol > 0) o.tol = args.tol;
  if (args.max_iter > 0) o.max_iter = args.max_iter;
  if (!args.deterministic.empty()) o.deterministic = args.deterministic == "on";
  return eafe::resolve_config(o);
}

int run_solve(const CommonArgs& args, const std::string& dump_matrix_path) {
  const eafe::RunConfig run = resolve(args);
  const eafe::SimplicialMesh mesh = run.load_mesh();
  const eafe::SparseSystem sys = eafe::assemble(mesh, run.coeffs, run.assembly);
  auto [A, rhs] = sys.eliminated();
  if (!dump_matrix_path.empty()) {
    std::ofstream dump(dump_matrix_path);
    if (!dump) throw eafe::ConfigError("cannot open '" + dump_matrix_path + "' for writing");
    eafe::dump_coordinate(A, dump);
  }
  auto [u, report] = eafe::solve(A, rhs, run.solver);
  if (!report.converged) {
    std::cerr << "solver did not converge: method " << report.method << ", "
              << report.iterations << " iterations, residual " << report.residual << "\n";
    return kExitSolver;
  }
  const std::string out_path = run.out_path.empty() ? "solution.vtk" : run.out_path;
  eafe::write_vtk(mesh, u, out_path);
  std::cout << "dofs=" << sys.n << " iters=" << report.iterations
            << " residual=" << report.residual << " method=" << report.method
            << " out=" << out_path << "\n";
  return kExitOk;
}

int run_converge(const CommonArgs& args, int levels) {
  const eafe::RunConfig run = resolve(args);
  if (!run.has_exact)
    throw eafe::ConfigError("problem '" + run.problem_name +
                            "' has no exact solution; cannot run a convergence study");
  if (run.mesh_path)
    throw eafe::ConfigError("convergence studies use structured meshes; give --n, not --mesh");

  eafe::StudyProblem problem;
  problem.coeffs = run.coeffs;
  problem.exact = run.exact;
  problem.exact_grad = run.exact_grad;
  problem.dim = run.dim;

  const int n0 = run.structured_n.value_or(8);
  const eafe::ConvergenceStudy study =
      eafe::convergence_study(problem, levels, n0, run.assembly, run.solver);

  if (!study.records.empty()) {
    const std::string out_path = run.out_path.empty() ? "convergence.csv" : run.out_path;
    std::ofstream csv(out_path);
    if (!csv) throw eafe::ConfigError("cannot open '" + out_path + "' for writing");
    eafe::write_csv(study.records, csv);
    eafe::write_csv(study.records, std::cout);
  }
  if (!study.completed) {
    std::cerr << "convergence study aborted: " << study.error << "\n";
    return kExitSolver;
  }
  const auto& last = study.records.back();
  std::cout << "final rates:";
  if (last.rate_l2) std::cout << " l2=" << *last.rate_l2;
  if (last.rate_h1) std::cout << " h1=" << *last.rate_h1;
  if (auto r = study.final_interp_h1_rate()) std::cout << " interp_h1=" << *r;
  if (!last.rate_l2) std::cout << " (single level)";
  std::cout << "\n";
  return kExitOk;
}

int run_check_monotone(const CommonArgs& args) {
  CommonArgs with_default = args;
  if (args.problem.empty() && args.config_path.empty())
    with_default.problem = "poisson2d";  // D = I audit when only a mesh is given
  const eafe::RunConfig run = resolve(with_default);
  const eafe::SimplicialMesh mesh = run.load_mesh();
  const eafe::MonotonicityReport report = eafe::monotonicity_audit(
      mesh, run.coeffs.D, run.assembly.scheme.omega_quad_degree, run.coeffs.alpha);

  std::cout << "monotone: " << (report.ok ? "yes" : "no") << "\n";
  std::cout << "min_edge_sum: " << report.min_sum << "\n";
  std::cout << "violators: " << report.violators.size() << "\n";
  for (std::size_t k = 0; k < report.violators.size() && k < 10; ++k) {
    const auto& edge = report.edges[static_cast<std::size_t>(report.violators[k])];
    std::cout << "  edge (" << edge.a + 1 << ", " << edge.b + 1
              << ") sum=" << report.edge_sums[static_cast<std::size_t>(report.violators[k])] << "\n";
  }
  return report.ok ? kExitOk : kExitNegative;
}

int run_problems() {
  for (const auto& p : eafe::problem_catalog()) {
    std::cout << p.name << " (" << p.dim << "D"
              << (p.has_exact ? ", exact solution" : ", no exact solution") << "): "
              << p.description << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exponentially fitted finite elements for convection-dominated diffusion"};
  app.require_subcommand(1);

  CommonArgs solve_args, conv_args, mono_args;
  int levels = 4;
  std::string dump_matrix_path;

  CLI::App* cmd_solve = app.add_subcommand("solve", "assemble and solve one problem");
  add_common_options(cmd_solve, &solve_args);
  cmd_solve->add_option("--dump-matrix", dump_matrix_path,
                        "write the eliminated matrix in 1-based 'i j value' lines");

  CLI::App* cmd_conv = app.add_subcommand("converge", "run a refinement study, write CSV");
  add_common_options(cmd_conv, &conv_args);
  cmd_conv->add_option("--levels", levels, "number of refinement levels")->check(CLI::PositiveNumber);

  CLI::App* cmd_mono = app.add_subcommand("check-monotone", "audit the mesh edge weights for D");
  add_common_options(cmd_mono, &mono_args);

  app.add_subcommand("problems", "list the built-in problem catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (cmd_solve->parsed()) return run_solve(solve_args, dump_matrix_path);
    if (cmd_conv->parsed()) return run_converge(conv_args, levels);
    if (cmd_mono->parsed()) return run_check_monotone(mono_args);
    return run_problems();
  } catch (const eafe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const eafe::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const eafe::MeshError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const eafe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
