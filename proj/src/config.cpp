#include "rhp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace rhp {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (trim(s.substr(used)).size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

}  // namespace

cplx parse_complex(const std::string& in) {
  std::string s;
  for (char c : in)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("empty complex number");
  if (s.back() != 'i') return parse_real(s);
  s.pop_back();
  // Split at the last sign that is not part of an exponent.
  std::size_t cut = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  auto imag_part = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t);
  };
  if (cut == std::string::npos) return {0.0, imag_part(s)};
  return {parse_real(s.substr(0, cut)), imag_part(s.substr(cut))};
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) {
    auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_real(parts[0]));
    } else if (parts.size() == 3) {
      const double a = parse_real(parts[0]), b = parse_real(parts[1]);
      const int n = std::stoi(parts[2]);
      if (n < 1) throw std::invalid_argument("range count must be positive");
      for (int k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
    } else {
      throw std::invalid_argument("expected a value or a:b:count, got '" + item + "'");
    }
  }
  return out;
}

std::vector<cplx> parse_complex_list(const std::string& s) {
  std::vector<cplx> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_complex(item));
  return out;
}

ConfigMap read_config(std::istream& in) {
  ConfigMap m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    m[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return m;
}

void apply_overrides(ConfigMap& m, const std::vector<std::string>& kv) {
  for (const auto& s : kv) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(s, "override must read key=value");
    m[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
  }
}

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::delta: return "delta";
    case Subcommand::solve: return "solve";
    case Subcommand::deform: return "deform";
    case Subcommand::sweep: return "sweep";
    case Subcommand::verify: return "verify";
  }
  return "?";
}

Subcommand parse_subcommand(const std::string& s) {
  for (auto c : {Subcommand::delta, Subcommand::solve, Subcommand::deform, Subcommand::sweep, Subcommand::verify})
    if (to_string(c) == s) return c;
  throw ConfigError("subcommand", "unknown subcommand '" + s + "'");
}

namespace {

const std::vector<std::string> kKeys = {
    "r",      "r0",       "residues",      "poles",  "table",   "x",       "t",      "p",
    "z",      "z0",       "n",             "R",      "L",       "beta",    "beta_prime",
    "gamma",  "tolerance", "max_condition", "route", "calibrate", "margin", "probes", "seed",
    "output", "plot",     "timestamp"};

template <class F>
auto field(const ConfigMap& m, const std::string& key, F parse) -> std::optional<decltype(parse(std::string()))> {
  auto it = m.find(key);
  if (it == m.end()) return std::nullopt;
  try {
    return parse(it->second);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, std::string("cannot parse '") + it->second + "': " + e.what());
  }
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected true or false");
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

RunConfig make_config(Subcommand sub, const ConfigMap& m) {
  for (const auto& [k, v] : m)
    if (std::find(kKeys.begin(), kKeys.end(), k) == kKeys.end()) throw ConfigError(k, "unknown key");
  RunConfig c;
  c.subcommand = sub;
  c.raw = m;
  auto str = [](const std::string& s) { return s; };
  auto real = [](const std::string& s) { return parse_real(s); };
  auto integer = [](const std::string& s) {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument("not an integer");
    return v;
  };
  if (auto v = field(m, "r", str)) c.r_kind = *v;
  if (auto v = field(m, "r0", parse_complex)) c.r0 = *v;
  if (auto v = field(m, "residues", parse_complex_list)) c.residues = *v;
  if (auto v = field(m, "poles", parse_complex_list)) c.poles = *v;
  if (auto v = field(m, "table", str)) c.table = *v;
  if (auto v = field(m, "x", parse_real_list)) c.x = *v;
  if (auto v = field(m, "t", parse_real_list)) c.t = *v;
  if (auto v = field(m, "p", [](const std::string& s) {
        std::vector<double> out;
        for (const auto& item : split(s, ','))
          out.push_back(item == "inf" ? kInf : parse_real(item));
        return out;
      }))
    c.p = *v;
  if (auto v = field(m, "z", parse_complex_list)) c.z = *v;
  if (auto v = field(m, "z0", real)) c.z0 = *v;
  if (auto v = field(m, "n", integer)) c.n = int(*v);
  if (auto v = field(m, "R", [](const std::string& s) { return s == "inf" ? kInf : parse_real(s); })) c.R = *v;
  if (auto v = field(m, "L", real)) c.L = *v;
  if (auto v = field(m, "beta", real)) c.beta = *v;
  if (auto v = field(m, "beta_prime", real)) c.beta_prime = *v;
  if (auto v = field(m, "gamma", real)) c.gamma = *v;
  if (auto v = field(m, "tolerance", real)) c.tolerance = *v;
  if (auto v = field(m, "max_condition", real)) c.max_condition = *v;
  if (auto v = field(m, "route", str)) {
    if (*v == "auto") c.route = RouteChoice::automatic;
    else if (*v == "direct") c.route = RouteChoice::direct;
    else if (*v == "deformed") c.route = RouteChoice::deformed;
    else throw ConfigError("route", "expected auto, direct or deformed");
  }
  if (auto v = field(m, "calibrate", parse_bool)) c.calibrate = *v;
  if (auto v = field(m, "margin", real)) c.margin = *v;
  if (auto v = field(m, "probes", integer)) c.probes = int(*v);
  if (auto v = field(m, "seed", integer)) c.seed = std::uint64_t(*v);
  if (auto v = field(m, "output", str)) c.output = *v;
  if (auto v = field(m, "plot", str)) c.plot = *v;
  if (auto v = field(m, "timestamp", parse_bool)) c.timestamp = *v;

  require(c.r_kind == "model" || c.r_kind == "rational" || c.r_kind == "table", "r",
          "expected model, rational or table");
  if (c.r_kind == "model") require(std::abs(c.r0) < 1.0, "r0", "model needs |r0| < 1");
  if (c.r_kind == "rational") {
    require(!c.poles.empty(), "poles", "rational r needs at least one pole");
    require(c.residues.size() == c.poles.size(), "residues", "needs one residue per pole");
    for (cplx p : c.poles) require(p.imag() != 0.0, "poles", "poles must lie off the real line");
  }
  if (c.r_kind == "table") require(!c.table.empty(), "table", "table r needs a file path");
  require(!c.x.empty(), "x", "needs at least one value");
  require(!c.t.empty(), "t", "needs at least one value");
  require(!c.p.empty(), "p", "needs at least one value");
  for (double p : c.p) require(p >= 1.0, "p", "norm indices must be >= 1");
  require(c.n >= 8 && c.n <= 4000, "n", "must lie in [8, 4000]");
  require(c.R > 0.0, "R", "must be positive");
  require(c.L > 0.0, "L", "must be positive");
  require(c.beta > 0.0 && c.beta < 0.5, "beta", "lens angle fraction must lie in (0, 1/2)");
  require(c.beta_prime > 0.0, "beta_prime", "must be positive");
  require(c.tolerance > 0.0, "tolerance", "must be positive");
  require(c.max_condition > 1.0, "max_condition", "must exceed 1");
  require(c.margin >= 1.0, "margin", "must be >= 1");
  require(c.probes >= 1, "probes", "must be >= 1");
  if (sub == Subcommand::solve || sub == Subcommand::deform) {
    require(c.x.size() == 1, "x", "takes a single value for this subcommand");
    require(c.t.size() == 1, "t", "takes a single value for this subcommand");
  }
  if (sub == Subcommand::deform) require(c.t[0] > 0.0, "t", "the deformation needs t > 0");
  if (sub == Subcommand::sweep)
    for (double p : c.p) require(p >= 2.0, "p", "sweep compares against bounds stated for p >= 2");
  return c;
}

Reflection table_reflection(std::vector<double> s, std::vector<cplx> r) {
  if (s.size() < 2 || s.size() != r.size()) throw DomainError("table reflection needs matching columns of length >= 2");
  for (std::size_t k = 1; k < s.size(); ++k)
    if (!(s[k] > s[k - 1])) throw DomainError("table abscissae must increase");
  double sup = 0.0;
  for (cplx v : r) sup = std::max(sup, std::abs(v));
  auto f = [s, r](cplx z) -> cplx {
    if (z.imag() != 0.0) throw DomainError("a tabulated reflection has no continuation off the real line");
    const double x = z.real();
    if (x < s.front() || x > s.back()) return 0.0;
    auto it = std::upper_bound(s.begin(), s.end(), x);
    std::size_t k = std::min<std::size_t>(std::size_t(it - s.begin()), s.size() - 1);
    const double a = (x - s[k - 1]) / (s[k] - s[k - 1]);
    return (1.0 - a) * r[k - 1] + a * r[k];
  };
  Reflection out;
  out.r = f;
  out.rbar = [f](cplx z) { return std::conj(f(std::conj(z))); };
  out.sup = sup;
  out.name = "table";
  out.analytic = false;
  out.breaks = s;
  return out;
}

Reflection read_table_reflection(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("table", "cannot open '" + path + "'");
  std::vector<double> s;
  std::vector<cplx> r;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double a, re, im;
    if (!(is >> a >> re >> im)) throw ConfigError("table", "rows must read 's re im'");
    s.push_back(a);
    r.emplace_back(re, im);
  }
  try {
    return table_reflection(std::move(s), std::move(r));
  } catch (const DomainError& e) {
    throw ConfigError("table", e.what());
  }
}

Reflection make_reflection(const RunConfig& c) {
  Reflection r;
  if (c.r_kind == "model") r = Reflection::model(c.r0);
  else if (c.r_kind == "rational") r = Reflection::rational(c.residues, c.poles);
  else r = read_table_reflection(c.table);
  if (!(r.sup < 1.0)) throw ConfigError("r", "sup |r| must be below 1");
  return r;
}

}  // namespace rhp
