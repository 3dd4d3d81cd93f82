#include "eafe/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace eafe {

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

IniFile IniFile::parse(std::istream& in, const std::string& source_name) {
  IniFile ini;
  ini.name_ = source_name;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments outside of quotes; expressions never contain # or ;.
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    const std::string text = strip(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']')
        throw ConfigError(source_name + ":" + std::to_string(lineno) + ": malformed section header");
      section = lower(strip(text.substr(1, text.size() - 2)));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = lower(strip(text.substr(0, eq)));
    const std::string value = strip(text.substr(eq + 1));
    if (key.empty())
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": empty key");
    ini.sections_[section][key] = value;
    ini.lines_[section + "." + key] = lineno;
  }
  return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

bool IniFile::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  auto v = get(section, key);
  return v ? *v : fallback;
}

namespace {

[[noreturn]] void bad_value(const std::string& name, const std::map<std::string, std::size_t>& lines,
                            const std::string& section, const std::string& key,
                            const std::string& value, const std::string& expected) {
  std::string where = name;
  auto it = lines.find(section + "." + key);
  if (it != lines.end()) where += ":" + std::to_string(it->second);
  throw ConfigError(where + ": [" + section + "] " + key + " = '" + value + "' is not " + expected);
}

}  // namespace

Real IniFile::get_real(const std::string& section, const std::string& key, Real fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const Real x = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    bad_value(name_, lines_, section, key, *v, "a number");
  }
}

int IniFile::get_int(const std::string& section, const std::string& key, int fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  int x = 0;
  auto res = std::from_chars(v->data(), v->data() + v->size(), x);
  if (res.ec != std::errc() || res.ptr != v->data() + v->size())
    bad_value(name_, lines_, section, key, *v, "an integer");
  return x;
}

bool IniFile::get_flag(const std::string& section, const std::string& key, bool fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  const std::string w = lower(*v);
  if (w == "on" || w == "true" || w == "1" || w == "yes") return true;
  if (w == "off" || w == "false" || w == "0" || w == "no") return false;
  bad_value(name_, lines_, section, key, *v, "on/off");
}

SimplicialMesh RunConfig::load_mesh() const {
  if (mesh_path) return read_mesh(*mesh_path);
  if (structured_n) return generate_structured(dim, *structured_n);
  throw ConfigError("no mesh source configured");
}

namespace {

CoefficientSet coefficients_from_ini(const IniFile& ini, int dim) {
  auto d_text = ini.get("coefficients", "d");
  auto b_text = ini.get("coefficients", "b");
  if (!d_text) throw ConfigError("[coefficients] must define D");

  CoefficientSet c;
  c.dim = dim;

  bool b_const = true;
  if (b_text) {
    c.b = vector_from_text(*b_text, dim, &b_const);
  } else {
    c.b = [dim](const Point&) { return Vector(Vector::Zero(dim)); };
  }
  c.b_constant = b_const;

  DispersionParams dispersion;
  if (parse_dispersion_call(*d_text, &dispersion)) {
    auto b_field = c.b;
    c.D = [dispersion, b_field](const Point& x) {
      return dispersion_tensor(dispersion, b_field(x));
    };
    c.D_constant = b_const;  // the tensor inherits constancy from b
  } else {
    bool d_const = true;
    c.D = tensor_from_text(*d_text, dim, &d_const);
    c.D_constant = d_const;
  }

  if (auto t = ini.get("coefficients", "gamma")) c.gamma = scalar_from_text(*t, dim);
  else c.gamma = [](const Point&) { return 0.0; };
  if (auto t = ini.get("coefficients", "f")) c.f = scalar_from_text(*t, dim);
  else c.f = [](const Point&) { return 0.0; };
  if (auto t = ini.get("coefficients", "g")) c.g = scalar_from_text(*t, dim);
  else c.g = [](const Point&) { return 0.0; };
  return c;
}

}  // namespace

RunConfig resolve_config(const CliOverrides& overrides) {
  RunConfig run;
  IniFile ini;
  const bool have_file = overrides.config_path.has_value();
  if (have_file) ini = IniFile::parse_file(*overrides.config_path);

  run.dim = overrides.dim.value_or(ini.get_int("problem", "dim", 2));
  if (run.dim != 2 && run.dim != 3) throw ConfigError("dim must be 2 or 3");

  // Problem source: CLI catalog name, else config 'problem =', else inline
  // [coefficients].
  std::string catalog_name = overrides.problem.value_or(ini.get_or("problem", "problem", ""));
  if (!catalog_name.empty()) {
    const CatalogProblem* p = find_problem(catalog_name);
    if (!p) {
      std::ostringstream os;
      os << "unknown catalog problem '" << catalog_name << "'; available:";
      for (const auto& name : problem_names()) os << ' ' << name;
      throw ConfigError(os.str());
    }
    run.problem_name = p->name;
    run.coeffs = p->coeffs;
    run.has_exact = p->has_exact;
    run.exact = p->exact;
    run.exact_grad = p->exact_grad;
    if (!overrides.dim && !ini.has("problem", "dim")) run.dim = p->dim;
    if (run.dim != p->dim)
      throw ConfigError("problem '" + p->name + "' is " + std::to_string(p->dim) + "D");
  } else if (have_file && ini.sections().count("coefficients")) {
    run.coeffs = coefficients_from_ini(ini, run.dim);
  } else {
    throw ConfigError("no problem source: give a catalog name or a config with [coefficients]");
  }

  // Mesh source: exactly one of a mesh file or a structured n.
  if (overrides.mesh_path) run.mesh_path = *overrides.mesh_path;
  else if (auto m = ini.get("problem", "mesh")) run.mesh_path = *m;
  if (overrides.n) run.structured_n = *overrides.n;
  else if (ini.has("problem", "n")) run.structured_n = ini.get_int("problem", "n", 0);

  if (run.mesh_path && run.structured_n)
    throw ConfigError("give either a mesh file or a structured n, not both");
  if (!run.mesh_path && !run.structured_n) run.structured_n = 8;
  if (run.structured_n && *run.structured_n < 1) throw ConfigError("n must be >= 1");
  if (run.mesh_path && !std::filesystem::exists(*run.mesh_path))
    throw ConfigError("mesh file '" + *run.mesh_path + "' does not exist");

  // Scheme options.
  run.assembly.scheme.edge_quad_points = ini.get_int("scheme", "edge_quad_points", 4);
  run.assembly.scheme.mass_quad_degree = ini.get_int("scheme", "mass_quad_degree", 2);
  run.assembly.scheme.omega_quad_degree = ini.get_int("scheme", "omega_quad_degree", 1);
  const std::string beta_mode = lower(ini.get_or("scheme", "constant_beta", "auto"));
  if (beta_mode == "auto") run.assembly.scheme.beta_mode = SchemeOptions::BetaMode::Auto;
  else if (beta_mode == "on") run.assembly.scheme.beta_mode = SchemeOptions::BetaMode::Constant;
  else if (beta_mode == "off") run.assembly.scheme.beta_mode = SchemeOptions::BetaMode::Quadrature;
  else throw ConfigError("constant_beta must be auto/on/off");
  run.alpha_scaling = ini.get_flag("scheme", "alpha_scaling", false);
  if (run.alpha_scaling) run.coeffs = alpha_scaled(run.coeffs);
  if (overrides.deterministic) run.assembly.deterministic = *overrides.deterministic;

  // Solver options.
  run.solver.tol = overrides.tol.value_or(ini.get_real("solver", "tol", 1e-10));
  run.solver.max_iter = overrides.max_iter.value_or(ini.get_int("solver", "max_iter", 5000));
  run.solver.restart = ini.get_int("solver", "restart", 50);
  run.solver.dense_threshold = ini.get_int("solver", "dense_threshold", 400);
  const std::string precond = lower(ini.get_or("solver", "preconditioner", "jacobi"));
  if (precond == "jacobi") run.solver.preconditioner = Preconditioner::Jacobi;
  else if (precond == "ilu0") run.solver.preconditioner = Preconditioner::ILU0;
  else if (precond == "none") run.solver.preconditioner = Preconditioner::None;
  else throw ConfigError("preconditioner must be jacobi/ilu0/none");

  run.out_path = overrides.out.value_or(ini.get_or("output", "solution", ""));
  return run;
}

}  // namespace eafe
