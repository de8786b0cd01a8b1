#include "rhp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

namespace rhp {

std::string to_string(NormMethod m) {
  switch (m) {
    case NormMethod::svd: return "svd";
    case NormMethod::lanczos: return "lanczos";
    case NormMethod::power_p: return "power_p";
    case NormMethod::rowsum_inf: return "rowsum_inf";
    case NormMethod::colsum_one: return "colsum_one";
    case NormMethod::interpolated: return "interpolated";
  }
  return "?";
}

std::string to_string(Route r) { return r == Route::direct ? "direct" : "deformed"; }

namespace {

// Weight of each row-stacked unknown.
Eigen::VectorXd stacked_weights(const CollocationGrid& g, Eigen::Index n2) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  if (n2 != 2 * n) throw DomainError("resolvent size does not match the grid");
  Eigen::VectorXd w(n2);
  for (Eigen::Index j = 0; j < n; ++j) w[j] = w[j + n] = g.weight(std::size_t(j));
  return w;
}

double lp(const VecX& x, double p) {
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p);
  return std::pow(s, 1.0 / p);
}

// Unit-norm dual vector in l^q of y in l^p.
VecX dual(const VecX& y, double p) {
  const double n = lp(y, p);
  VecX d(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double a = std::abs(y[i]);
    d[i] = a > 0.0 ? std::pow(a / n, p - 1.0) * (y[i] / a) : cplx(0.0);
  }
  return d;
}

VecX random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  VecX x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = cplx(nd(rng), nd(rng));
  return x;
}

struct WeightedOp {
  const Resolvent& res;
  Eigen::VectorXd wp, wmp;  // W^{1/p}, W^{-1/p}
  VecX apply(const VecX& x) const { return wp.cwiseProduct(res.solve(wmp.cwiseProduct(x))); }
  VecX apply_adjoint(const VecX& y) const { return wmp.cwiseProduct(res.solve_adjoint(wp.cwiseProduct(y))); }
};

WeightedOp weighted(const Resolvent& res, const Eigen::VectorXd& w, double p) {
  WeightedOp op{res, w, w};
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double a = std::isinf(p) ? 1.0 : std::pow(w[i], 1.0 / p);
    op.wp[i] = a;
    op.wmp[i] = 1.0 / a;
  }
  return op;
}

// Largest eigenvalue of a Hermitian positive operator by Lanczos with full
// reorthogonalization; also returns the Ritz residual.
double lanczos_top(const std::function<VecX(const VecX&)>& m, Eigen::Index n, std::uint64_t seed, double& resid) {
  std::mt19937_64 rng(seed);
  VecX q = random_vector(n, rng);
  q.normalize();
  std::vector<VecX> basis;
  std::vector<double> alpha, beta;
  const int kmax = int(std::min<Eigen::Index>(n, 200));
  double theta = 0.0;
  resid = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kmax; ++k) {
    basis.push_back(q);
    VecX w = m(q);
    const double a = q.dot(w).real();
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) w -= b.dot(w) * b;
    const double b = w.norm();
    Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), Eigen::Index(alpha.size()));
    Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(beta.data(), Eigen::Index(beta.size()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    Eigen::Index top;
    theta = es.eigenvalues().maxCoeff(&top);
    resid = b * std::abs(es.eigenvectors()(Eigen::Index(k), top));
    if (resid <= 1e-14 * theta || b <= 1e-300) break;
    beta.push_back(b);
    q = w / b;
  }
  return theta;
}

// Block Higham-Boyd iteration on the explicit weighted inverse; every probe
// gives a lower bound for the l^p norm.
double power_lower_bound(const MatX& b, double p, const NormOptions& opt) {
  const Eigen::Index n = b.rows();
  const double q = p / (p - 1.0);
  const int k = std::max(1, opt.probes);
  std::mt19937_64 rng(opt.seed);
  MatX x(n, k);
  x.col(0).setOnes();
  for (int j = 1; j < k; ++j) x.col(j) = random_vector(n, rng);
  for (int j = 0; j < k; ++j) x.col(j) /= lp(x.col(j), p);
  std::vector<bool> done(std::size_t(k), false);
  double best = 0.0;
  for (int it = 0; it < opt.power_iterations; ++it) {
    MatX y = b * x;
    MatX d(n, k);
    for (int j = 0; j < k; ++j) {
      best = std::max(best, lp(y.col(j), p));
      d.col(j) = dual(y.col(j), p);
    }
    MatX z = b.adjoint() * d;
    bool all = true;
    for (int j = 0; j < k; ++j) {
      if (done[std::size_t(j)]) continue;
      if (lp(z.col(j), q) <= z.col(j).dot(x.col(j)).real() * (1.0 + 1e-10)) {
        done[std::size_t(j)] = true;
        continue;
      }
      all = false;
      x.col(j) = dual(z.col(j), q);
    }
    if (all) break;
  }
  return best;
}

}  // namespace

NormEstimate resolvent_norm(const Resolvent& res, const CollocationGrid& g, double p, const NormOptions& opt) {
  if (!(p >= 1.0)) throw DomainError("resolvent_norm needs p >= 1");
  const Eigen::Index n2 = res.size();
  const Eigen::VectorXd w = stacked_weights(g, n2);
  NormEstimate est;
  est.p = p;
  if (p == 2.0 && n2 > opt.dense_svd_limit) {
    WeightedOp op = weighted(res, w, 2.0);
    double resid = 0.0;
    auto gram = [&op](const VecX& x) { return op.apply_adjoint(op.apply(x)); };
    est.value = est.lo = est.hi = std::sqrt(lanczos_top(gram, n2, opt.seed, resid));
    est.method = NormMethod::lanczos;
    return est;
  }
  // Everything else works on the explicit inverse.
  const MatX inv = res.inverse();
  auto scaled = [&](double e) {
    Eigen::VectorXd a(n2);
    for (Eigen::Index i = 0; i < n2; ++i) a[i] = std::pow(w[i], e);
    return MatX(a.asDiagonal() * inv * a.cwiseInverse().asDiagonal());
  };
  auto two_norm = [&]() {
    MatX b = scaled(0.5);
    if (n2 <= opt.dense_svd_limit) return Eigen::BDCSVD<MatX>(b).singularValues()[0];
    double resid = 0.0;
    auto gram = [&b](const VecX& x) { return VecX(b.adjoint() * (b * x)); };
    return std::sqrt(lanczos_top(gram, n2, opt.seed, resid));
  };
  if (p == 2.0) {
    est.value = est.lo = est.hi = two_norm();
    est.method = NormMethod::svd;
    est.certified = true;
    return est;
  }
  if (std::isinf(p)) {
    est.value = est.lo = est.hi = inv.cwiseAbs().rowwise().sum().maxCoeff();
    est.method = NormMethod::rowsum_inf;
    est.certified = true;
    return est;
  }
  if (p == 1.0) {
    est.value = est.lo = est.hi = scaled(1.0).cwiseAbs().colwise().sum().maxCoeff();
    est.method = NormMethod::colsum_one;
    est.certified = true;
    return est;
  }
  const double n2norm = two_norm();
  if (p > 2.0) {
    const double ninf = inv.cwiseAbs().rowwise().sum().maxCoeff();
    est.hi = std::pow(n2norm, 2.0 / p) * std::pow(ninf, 1.0 - 2.0 / p);
  } else {
    const double n1 = scaled(1.0).cwiseAbs().colwise().sum().maxCoeff();
    est.hi = std::pow(n1, 2.0 / p - 1.0) * std::pow(n2norm, 2.0 - 2.0 / p);
  }
  est.lo = std::min(power_lower_bound(scaled(1.0 / p), p, opt), est.hi);
  est.value = est.hi;
  est.method = NormMethod::interpolated;
  est.probes = opt.probes;
  est.certified = false;
  return est;
}

NormEstimate resolvent_norm(const CauchyPair& c, const JumpMatrix& v, double p, const NormOptions& opt) {
  Resolvent res(assemble_Cv(c, v));
  return resolvent_norm(res, *c.grid, p, opt);
}

std::pair<double, double> bound_exponents(double p, double beta_prime) {
  return {7.0 + 2.0 / p, 31.0 + 12.0 / p + beta_prime};
}

double theoretical_bound(double lambda, double rho, double p, double beta_prime, double c) {
  if (!(p >= 2.0)) throw DomainError("theoretical_bound covers p >= 2 only; use duality for p < 2");
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("theoretical_bound needs 0 <= rho < 1");
  if (!(lambda >= 0.0)) throw DomainError("theoretical_bound needs lambda >= 0");
  if (p == 2.0) return c / (1.0 - rho);
  auto [a, b] = bound_exponents(p, beta_prime);
  return c * std::pow(1.0 + lambda, a) / std::pow(1.0 - rho, b);
}

BoundReport bound_report(const NormEstimate& est, double lambda, double rho, double beta_prime, double c) {
  BoundReport b;
  b.estimate = est;
  b.lambda = lambda;
  b.rho = rho;
  b.p = est.p;
  b.beta_prime = beta_prime;
  b.theoretical = theoretical_bound(lambda, rho, est.p, beta_prime, c);
  b.ratio = est.value / b.theoretical;
  return b;
}

double conjugation_constant(const ConjugationInputs& in) {
  double c = in.c * in.R_sup * in.R_inv_sup * in.breve_resolvent_p * in.breve_resolvent_2 * in.resolvent_2 *
             in.resolvent_2 * std::pow(in.mnorm_v, 3) * std::pow(in.mnorm_breve, 2) *
             std::pow(1.0 + in.l2_breve_minus_I, 2) * std::pow(1.0 + in.l2_v_minus_I, 2);
  if (in.dist <= 0.0) throw DomainError("dist(Gamma, Gamma') must be positive");
  if (in.dist <= 1.0) c /= std::pow(in.dist, 1.5 + 1.0 / in.p);
  return c;
}

double riesz_thorin_interpolate(double norm_p2, double norm_pk, double p, double k) {
  if (!(k > 1.0)) throw DomainError("interpolation needs k > 1");
  if (!(p >= 2.0 && p < k * p)) throw DomainError("interpolation needs 2 <= p < k p");
  const double xi = (1.0 - 2.0 / p) / (1.0 - 2.0 / (k * p));
  return std::pow(norm_p2, 1.0 - xi) * std::pow(norm_pk, xi);
}

std::pair<double, double> interpolated_exponents(double p, double k, double beta_prime) {
  if (!(k > 1.0 && p > 2.0)) throw DomainError("interpolated exponents need k > 1 and p > 2");
  const double xi = (1.0 - 2.0 / p) / (1.0 - 2.0 / (k * p));
  auto [a, b] = bound_exponents(p, beta_prime);
  return {a * xi, b * xi + (1.0 - xi)};
}

double max_phase_step(const CollocationGrid& g, double x, double t) {
  double m = 0.0;
  for (std::size_t k = 0; k < g.contour().size(); ++k) {
    for (std::size_t j = g.piece_begin(k) + 1; j < g.piece_end(k); ++j) {
      const cplx a = g.node(j - 1), b = g.node(j);
      if (std::isinf(std::abs(b))) continue;
      m = std::max(m, std::abs(theta(b, x, t) - theta(a, x, t)));
    }
  }
  return m;
}

GridPtr direct_line_grid(double x, double t, const DirectGridOptions& opt) {
  if (x == 0.0 && t == 0.0) return discretize(build_real_line(), opt.n, kInf);
  GridPtr g;
  for (int m = 1; m <= opt.max_pieces_per_side; ++m) {
    Contour c;
    for (int i = 0; i < m; ++i) {
      const double a = opt.L * i / m, b = opt.L * (i + 1) / m;
      c.pieces.push_back(ContourPiece::segment(-b, -a));
      c.pieces.push_back(ContourPiece::segment(a, b));
    }
    c.tag = ContourTag::real_line;
    g = discretize(c, opt.n, opt.L);
    if (max_phase_step(*g, x, t) < opt.max_phase_step) break;
  }
  return g;
}

DeformedOperator deformed_operator(const Reflection& r, double t, const DeformOptions& opt) {
  if (!(t > 0.0)) throw DomainError("the deformed route needs t > 0");
  DeltaFunction delta(r, 0.0);
  BreveJump bt = scale(conjugate_by_delta(nls_jump(r, 0.0, t), delta), t);
  LensedProblem full = augment_and_lens(bt, opt.beta);
  Contour x;
  for (std::size_t k = 0; k < full.contour.size(); ++k)
    if (std::abs(full.contour.pieces[k].axis().imag()) > 1e-15) x.pieces.push_back(full.contour.pieces[k]);
  x.tag = ContourTag::custom;
  x.param = opt.beta;
  LensedProblem lens{x, bt, opt.beta};
  DeformedOperator out;
  out.grid = discretize(x, opt.n, opt.R, opt.grid);
  out.jump = lens.jump();
  return out;
}

namespace {

struct Reduction {
  Reflection r;
  double x, t;
};

Reduction reduce(const Reflection& r, double x, double t) {
  Reduction out{r, x, t};
  if (out.t < 0.0) {
    Reduced m = reflect_reduce(out.r, out.x, out.t);
    out.r = m.r;
    out.t = m.t;
  }
  if (out.t > 0.0 && out.x != 0.0) {
    Reduced s = translate_reduce(out.r, out.x, out.t);
    out.r = s.r;
    out.x = 0.0;
  }
  return out;
}

}  // namespace

SweepPoint sweep_point(const Reflection& r, double p, double x, double t, const SweepOptions& opt) {
  SweepPoint pt;
  pt.x = x;
  pt.t = t;
  pt.p = p;
  try {
    const double lambda = h1_norm(r);
    const Calibration& cal = opt.calibration;
    pt.theoretical = theoretical_bound(lambda, r.sup, p, opt.beta_prime, p == 2.0 ? cal.c2 : cal.cp);
    Reduction red = reduce(r, x, t);
    GridPtr direct = direct_line_grid(red.x, red.t, opt.direct);
    const bool resolved = max_phase_step(*direct, red.x, red.t) < opt.direct.max_phase_step;
    // t = 0 has no oscillation to remove; it always goes direct.
    if (opt.force) pt.route = red.t == 0.0 ? Route::direct : opt.forced;
    else pt.route = (resolved || red.t == 0.0 || !red.r.analytic) ? Route::direct : Route::deformed;
    GridPtr grid;
    JumpMatrix v;
    if (pt.route == Route::direct) {
      grid = direct;
      v = nls_jump(red.r, red.x, red.t);
      pt.trusted = resolved;
    } else {
      if (red.x != 0.0 || red.t <= 0.0) throw DomainError("the deformed route needs x = 0 and t > 0 after reduction");
      DeformedOperator d = deformed_operator(red.r, red.t, opt.deform);
      grid = d.grid;
      v = d.jump;
      pt.trusted = true;
    }
    CauchyPair c(grid);
    Resolvent res(assemble_Cv(c, v));
    pt.estimate = resolvent_norm(res, *grid, p, opt.norm);
    pt.residual = solve_normalized(c, v, res, 2.0).jump_residual;
    pt.condition = res.condition();
  } catch (const std::exception& e) {
    pt.error = e.what();
  }
  return pt;
}

std::vector<SweepPoint> uniformity_sweep(const Reflection& r, double p,
                                         const std::vector<std::pair<double, double>>& xt, const SweepOptions& opt) {
  std::vector<SweepPoint> out;
  out.reserve(xt.size());
  for (auto [x, t] : xt) out.push_back(sweep_point(r, p, x, t, opt));
  return out;
}

Calibration calibrate(double p, double beta_prime, double margin, int n) {
  Calibration cal;
  cal.p = p;
  cal.beta_prime = beta_prime;
  cal.margin = margin;
  cal.reference = "model rho=0.3, x=0, t=1, n=" + std::to_string(n);
  const double rho = 0.3;
  Reflection r = Reflection::model(rho);
  SweepOptions opt;
  opt.direct.n = n;
  opt.deform.n = n;
  opt.beta_prime = beta_prime;
  SweepPoint two = sweep_point(r, 2.0, 0.0, 1.0, opt);
  SweepPoint pp = sweep_point(r, p, 0.0, 1.0, opt);
  if (!two.error.empty() || !pp.error.empty()) throw NumericalError("calibration solve failed", 0.0);
  const double lambda = h1_norm(r);
  auto [a, b] = bound_exponents(p, beta_prime);
  cal.c2 = margin * two.estimate.value * (1.0 - rho);
  cal.cp = margin * pp.estimate.hi * std::pow(1.0 - rho, b) / std::pow(1.0 + lambda, a);
  GridPtr g = direct_line_grid(0.0, 1.0, opt.direct);
  const double mv = mnorm(nls_jump(r, 0.0, 1.0), *g);
  cal.c0 = two.estimate.value * mv / margin;
  return cal;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& pts) {
  os << "x,t,p,estimate_lo,estimate_hi,theoretical,route,residual,condition\n";
  os << std::setprecision(10);
  for (const auto& s : pts) {
    if (!s.error.empty()) {
      os << s.x << ',' << s.t << ',' << s.p << ",nan,nan," << s.theoretical << ',' << to_string(s.route)
         << ",nan,nan\n";
      continue;
    }
    os << s.x << ',' << s.t << ',' << s.p << ',' << s.estimate.lo << ',' << s.estimate.hi << ',' << s.theoretical
       << ',' << to_string(s.route) << ',' << s.residual << ',' << s.condition << '\n';
  }
}

}  // namespace rhp
