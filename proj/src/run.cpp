#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "rhp/config.hpp"
#include "rhp/verify.hpp"

namespace rhp {

namespace {

// Output stream for the configured path, or the fallback.
struct Sink {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os;
  Sink(const std::string& path, std::ostream& fallback) : os(&fallback) {
    if (path.empty()) return;
    file = std::make_unique<std::ofstream>(path);
    if (!*file) throw ConfigError("output", "cannot open '" + path + "' for writing");
    os = file.get();
  }
  std::ostream& operator*() { return *os; }
};

void stamp(std::ostream& os, const RunConfig& c) {
  if (!c.timestamp) return;
  std::time_t now = std::time(nullptr);
  os << "# generated " << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << '\n';
}

std::vector<cplx> default_delta_points(double z0) {
  std::vector<cplx> z;
  for (int k = -12; k <= 12; ++k)
    if (k != 0) z.emplace_back(z0 + 0.25 * k, 0.0);
  for (double y : {0.5, -0.5, 2.0, -2.0})
    for (double x : {-1.0, 0.0, 1.0}) z.emplace_back(z0 + x, y);
  return z;
}

int run_delta(const RunConfig& c, std::ostream& out) {
  Reflection r = make_reflection(c);
  DeltaFunction d(r, c.z0);
  std::vector<cplx> pts = c.z.empty() ? default_delta_points(c.z0) : c.z;
  Sink sink(c.output, out);
  std::ostream& os = *sink;
  stamp(os, c);
  os << "re_z,im_z,re_delta,im_delta,abs_delta,symmetry_residual,modulus_residual,jump_residual\n";
  os << std::setprecision(12);
  bool ok = true;
  for (cplx z : pts) {
    const bool on_cut = z.imag() == 0.0 && z.real() <= c.z0;
    if (on_cut && std::abs(z.real() - c.z0) < d.exclusion) throw ConfigError("z", "point inside the exclusion zone of z0");
    cplx val = on_cut ? d.boundary(z.real(), 1) : d(z);
    double sym = std::nan(""), mod = std::nan(""), jump = std::nan("");
    if (on_cut) {
      const double x = z.real();
      mod = std::abs(std::abs(val) - std::sqrt(1.0 - r.abs2(x)));
      jump = std::abs(val - d.boundary(x, -1) * (1.0 - r.abs2(x)));
      ok = ok && mod <= c.tolerance && jump <= c.tolerance;
    } else {
      sym = std::abs(val * std::conj(d(std::conj(z))) - 1.0);
      ok = ok && sym <= c.tolerance;
    }
    os << z.real() << ',' << z.imag() << ',' << val.real() << ',' << val.imag() << ',' << std::abs(val) << ','
       << sym << ',' << mod << ',' << jump << '\n';
  }
  return ok ? kOk : kInvariantFailure;
}

int run_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Reflection r = make_reflection(c);
  const double x = c.x[0], t = c.t[0];
  SolveOptions so;
  so.max_condition = c.max_condition;
  so.tolerance = c.tolerance;
  RHPSolution sol;
  if (c.route == RouteChoice::deformed) {
    if (x != 0.0) throw ConfigError("x", "the deformed solve is set up at x = 0");
    DeformOptions o;
    o.n = c.n;
    o.beta = c.beta;
    sol = solve_deformed(r, t, o, so).hat;
  } else {
    GridPtr g;
    if (x == 0.0 && t == 0.0) {
      g = discretize(build_real_line(), c.n, c.R);
    } else {
      DirectGridOptions o;
      o.n = c.n;
      o.L = c.L;
      g = direct_line_grid(x, t, o);
      if (max_phase_step(*g, x, t) >= o.max_phase_step)
        err << "warning: the direct grid does not resolve the phase at t = " << t << "\n";
    }
    CauchyPair cp(g);
    sol = solve_normalized(cp, nls_jump(r, x, t), 2.0, so);
  }
  Sink sink(c.output, out);
  stamp(*sink, c);
  *sink << std::setprecision(12);
  write_solution(*sink, sol);
  return sol.jump_residual <= c.tolerance ? kOk : kInvariantFailure;
}

int run_deform(const RunConfig& c, std::ostream& out) {
  Reflection r = make_reflection(c);
  const double t = c.t[0];
  if (c.x[0] != 0.0) r = translate_reduce(r, c.x[0], t).r;
  DeformationPlan plan(r, t, c.beta, c.gamma);
  nlohmann::json j = plan.stage_record();
  j["x"] = c.x[0];
  if (c.timestamp) j["generated"] = std::time(nullptr);
  Sink sink(c.output, out);
  *sink << j.dump(2) << '\n';
  return kOk;
}

int run_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Reflection r = make_reflection(c);
  std::vector<std::pair<double, double>> xt;
  for (double t : c.t)
    for (double x : c.x) xt.emplace_back(x, t);
  SweepOptions opt;
  opt.direct.n = c.n;
  opt.direct.L = c.L;
  opt.deform.n = c.n;
  opt.deform.beta = c.beta;
  opt.beta_prime = c.beta_prime;
  opt.norm.probes = c.probes;
  opt.norm.seed = c.seed;
  if (c.route != RouteChoice::automatic) {
    opt.force = true;
    opt.forced = c.route == RouteChoice::direct ? Route::direct : Route::deformed;
  }
  std::vector<SweepPoint> all;
  bool within = true, failed = false;
  std::unique_ptr<std::ofstream> plot;
  if (!c.plot.empty()) {
    plot = std::make_unique<std::ofstream>(c.plot);
    if (!*plot) throw ConfigError("plot", "cannot open '" + c.plot + "' for writing");
  }
  for (double p : c.p) {
    opt.calibration = c.calibrate ? calibrate(p, c.beta_prime, c.margin, c.n) : Calibration{};
    err << "calibration p=" << p << ": c2=" << opt.calibration.c2 << " cp=" << opt.calibration.cp
        << " c0=" << opt.calibration.c0 << " (" << opt.calibration.reference << ")\n";
    auto pts = uniformity_sweep(r, p, xt, opt);
    for (const auto& s : pts) {
      if (!s.error.empty()) {
        failed = true;
        err << "point x=" << s.x << " t=" << s.t << " failed: " << s.error << "\n";
      } else if (s.estimate.value > s.theoretical) {
        within = false;
      }
      if (s.error.empty() && !s.trusted) err << "point x=" << s.x << " t=" << s.t << " used an unresolved direct grid\n";
    }
    if (plot) {
      nlohmann::json series{{"series", "estimate"}, {"p", p}};
      for (const auto& s : pts) {
        series["x"].push_back(s.x);
        series["t"].push_back(s.t);
        series["lo"].push_back(s.estimate.lo);
        series["hi"].push_back(s.estimate.hi);
        series["theoretical"].push_back(s.theoretical);
      }
      *plot << series.dump() << '\n';
    }
    all.insert(all.end(), pts.begin(), pts.end());
  }
  Sink sink(c.output, out);
  stamp(*sink, c);
  write_sweep_csv(*sink, all);
  if (failed) return kNumericalFailure;
  return within ? kOk : kInvariantFailure;
}

int run_verify(const RunConfig& c, std::ostream& out) {
  VerifyOptions o;
  o.n = std::min(c.n, 400);
  if (c.raw.find("n") == c.raw.end()) o.n = 100;
  o.seed = c.seed;
  auto results = verify_suite(o);
  nlohmann::json j = verify_summary(results);
  if (c.timestamp) j["generated"] = std::time(nullptr);
  Sink sink(c.output, out);
  *sink << j.dump(2) << '\n';
  return j["passed"].get<bool>() ? kOk : kInvariantFailure;
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    switch (c.subcommand) {
      case Subcommand::delta: return run_delta(c, out);
      case Subcommand::solve: return run_solve(c, out, err);
      case Subcommand::deform: return run_deform(c, out);
      case Subcommand::sweep: return run_sweep(c, out, err);
      case Subcommand::verify: return run_verify(c, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " (condition " << e.condition << ")\n";
    return kNumericalFailure;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace rhp
