#include "rhp/panel.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace rhp {

void gauss_legendre(int q, std::vector<double>& x, std::vector<double>& w) {
  x.assign(q, 0.0);
  w.assign(q, 0.0);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (q + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= q; ++k) {
        double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = q * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= q; ++k) {
      double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = q * (t * p1 - p0) / (t * t - 1.0);
    double wi = 2.0 / ((1.0 - t * t) * dp * dp);
    x[i] = -t;
    x[q - 1 - i] = t;
    w[i] = w[q - 1 - i] = wi;
  }
  if (q % 2 == 1) x[q / 2] = 0.0;
}

namespace {

std::unique_ptr<PanelRule> make_rule(int q) {
  auto r = std::make_unique<PanelRule>();
  r->q = q;
  gauss_legendre(q, r->x, r->w);
  gauss_legendre(4 * q, r->xf, r->wf);
  r->interp.resize(4 * q, q);
  for (int m = 0; m < 4 * q; ++m) {
    for (int j = 0; j < q; ++j) {
      double l = 1.0;
      for (int k = 0; k < q; ++k)
        if (k != j) l *= (r->xf[m] - r->x[k]) / (r->x[j] - r->x[k]);
      r->interp(m, j) = l;
    }
  }
  Eigen::MatrixXd vt(q, q);
  for (int k = 0; k < q; ++k)
    for (int j = 0; j < q; ++j) vt(k, j) = std::pow(r->x[j], k);
  r->vandermonde_t.compute(vt);
  return r;
}

}  // namespace

const PanelRule& panel_rule(int q) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<PanelRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[q];
  if (!slot) slot = make_rule(q);
  return *slot;
}

double bernstein_rho(cplx zeta) {
  cplx s = std::sqrt(zeta - 1.0) * std::sqrt(zeta + 1.0);
  return std::max(std::abs(zeta + s), std::abs(zeta - s));
}

void cauchy_weights(const PanelRule& r, cplx zeta, bool principal_value, cplx* out) {
  const int q = r.q;
  double rho = principal_value ? 1.0 : bernstein_rho(zeta);
  const double direct_rho = std::pow(10.0, 8.0 / q);
  if (rho >= direct_rho) {
    for (int j = 0; j < q; ++j) out[j] = r.w[j] / (r.x[j] - zeta);
    return;
  }
  if (rho >= 1.5) {
    // Interpolate onto the fourfold rule and integrate directly there.
    const int f = static_cast<int>(r.xf.size());
    Eigen::VectorXcd kern(f);
    for (int m = 0; m < f; ++m) kern[m] = r.wf[m] / (r.xf[m] - zeta);
    Eigen::VectorXcd res = r.interp.transpose().cast<cplx>() * kern;
    for (int j = 0; j < q; ++j) out[j] = res[j];
    return;
  }
  // Monomial moments p_k = int x^k / (x - zeta) by upward recursion.
  Eigen::VectorXcd p(q);
  if (principal_value) {
    double z = zeta.real();
    p[0] = std::log((1.0 - z) / (1.0 + z));
  } else {
    p[0] = std::log((zeta - 1.0) / (zeta + 1.0));
  }
  for (int k = 0; k + 1 < q; ++k) {
    double mom = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
    p[k + 1] = zeta * p[k] + mom;
  }
  Eigen::VectorXd re = r.vandermonde_t.solve(Eigen::VectorXd(p.real()));
  Eigen::VectorXd im = r.vandermonde_t.solve(Eigen::VectorXd(p.imag()));
  for (int j = 0; j < q; ++j) out[j] = cplx(re[j], im[j]);
}

}  // namespace rhp
