#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rhp/bounds.hpp"

namespace rhp {

/// Invalid configuration; `field` names the offending key.
struct ConfigError : std::invalid_argument {
  std::string field;
  ConfigError(std::string f, const std::string& what)
      : std::invalid_argument(f + ": " + what), field(std::move(f)) {}
};

/// "1.5", "-0.3i", "i", "0.1+0.05i", "1-2i".
cplx parse_complex(const std::string& s);
/// Comma-separated reals; an entry "a:b:n" expands to n equispaced values.
std::vector<double> parse_real_list(const std::string& s);
std::vector<cplx> parse_complex_list(const std::string& s);

using ConfigMap = std::map<std::string, std::string>;

/// key = value lines; '#' starts a comment; later keys override earlier ones.
ConfigMap read_config(std::istream& in);
/// "key=value" overrides on top of a map.
void apply_overrides(ConfigMap& m, const std::vector<std::string>& kv);

enum class Subcommand { delta, solve, deform, sweep, verify };
std::string to_string(Subcommand s);
Subcommand parse_subcommand(const std::string& s);

enum class RouteChoice { automatic, direct, deformed };

struct RunConfig {
  Subcommand subcommand = Subcommand::verify;

  // Reflection coefficient.
  std::string r_kind = "model";  // model | rational | table
  cplx r0 = 0.5;
  std::vector<cplx> residues, poles;
  std::string table;  // file of "s re im" rows

  std::vector<double> x{0.0};
  std::vector<double> t{0.0};
  std::vector<double> p{2.0};
  std::vector<cplx> z;  // delta sample points
  double z0 = 0.0;

  int n = 200;
  double R = kInf;  // ray truncation of the direct grid at x = t = 0
  double L = 12.0;  // half-width of the direct grid otherwise
  double beta = 0.25;
  double beta_prime = 0.01;
  double gamma = -1.0;  // mollification width; <= 0 picks it from lambda and rho
  double tolerance = 1e-6;
  double max_condition = 1e12;
  RouteChoice route = RouteChoice::automatic;
  bool calibrate = true;
  double margin = 2.0;

  int probes = 10;
  std::uint64_t seed = 1;

  std::string output;  // empty: standard output
  std::string plot;    // line-delimited JSON series; empty: none
  bool timestamp = false;

  ConfigMap raw;
};

/// Validated configuration; throws ConfigError naming the field.
RunConfig make_config(Subcommand sub, const ConfigMap& m);

/// Reflection coefficient described by the config.
Reflection make_reflection(const RunConfig& c);
/// Piecewise-linear r through (s_k, r_k), zero outside [s_0, s_last]. Not analytic.
Reflection table_reflection(std::vector<double> s, std::vector<cplx> r);
Reflection read_table_reflection(const std::string& path);

/// Exit codes of the batch driver.
enum ExitCode { kOk = 0, kInvariantFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

/// Run one subcommand. Artifacts go to the configured paths, or `out` when
/// no output path is set; diagnostics go to `err`.
int run(const RunConfig& c, std::ostream& out, std::ostream& err);

}  // namespace rhp
