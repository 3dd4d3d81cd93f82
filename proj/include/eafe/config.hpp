#ifndef EAFE_CONFIG_HPP
#define EAFE_CONFIG_HPP

#include "eafe/assembly.hpp"
#include "eafe/catalog.hpp"
#include "eafe/coeff.hpp"
#include "eafe/linalg.hpp"
#include "eafe/mesh.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace eafe {

/// Sectioned key = value text ([section] headers, # and ; comments).
/// Values keep their raw text; typed accessors throw ConfigError with the
/// line number on malformed entries.
class IniFile {
public:
  static IniFile parse(std::istream& in, const std::string& source_name = "<stream>");
  static IniFile parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  Real get_real(const std::string& section, const std::string& key, Real fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_flag(const std::string& section, const std::string& key, bool fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::map<std::string, std::size_t> lines_;  // "section.key" -> line number
  std::string name_;
};

/// A fully resolved run: problem data, mesh source, scheme/solver options and
/// output paths. Exactly one mesh source (file or structured n) is allowed;
/// referenced files are checked at validation time.
struct RunConfig {
  std::string problem_name;  // catalog name, empty for config-defined coefficients
  CoefficientSet coeffs;
  bool has_exact = false;
  ScalarField exact;
  VectorField exact_grad;

  int dim = 2;
  std::optional<std::string> mesh_path;
  std::optional<int> structured_n;

  bool alpha_scaling = false;
  AssemblyOptions assembly;
  SolverOptions solver;

  std::string out_path;  // solution or CSV target; empty means default

  SimplicialMesh load_mesh() const;
};

struct CliOverrides {
  std::optional<std::string> problem;
  std::optional<std::string> config_path;
  std::optional<std::string> mesh_path;
  std::optional<int> n;
  std::optional<int> dim;
  std::optional<std::string> out;
  std::optional<Real> tol;
  std::optional<int> max_iter;
  std::optional<bool> deterministic;
};

/// Merges a config file (optional) with command-line overrides and resolves
/// the problem source. Throws ConfigError on contradictions, unknown catalog
/// names (the message lists the catalog) or missing files.
RunConfig resolve_config(const CliOverrides& overrides);

}  // namespace eafe

#endif
