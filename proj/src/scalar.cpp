#include "rhp/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rhp/panel.hpp"

namespace rhp {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr unsigned kDepth = 10;

template <class F>
auto gk(F f, double a, double b, double tol) {
  return gauss_kronrod<double, 31>::integrate(f, a, b, kDepth, tol);
}

/// Sum of integrals over consecutive intervals of `pts` (first may be -inf).
template <class F>
auto gk_pieces(F f, const std::vector<double>& pts, double tol) {
  decltype(f(0.0)) s{};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1] > pts[i]) s += gk(f, pts[i], pts[i + 1], tol);
  return s;
}

}  // namespace

DeltaFunction::DeltaFunction(Reflection r, double z0, double rho) : r_(std::move(r)), z0_(z0), rho_(rho) {
  if (rho_ < 0.0) rho_ = r_.sup;
  if (!(rho_ < 1.0)) throw DomainError("delta needs sup|r| <= rho < 1");
}

double DeltaFunction::f(double s) const { return std::log1p(-r_.abs2(s)); }

std::vector<double> DeltaFunction::breaks_in(double a, double b) const {
  std::vector<double> pts{a};
  for (double p : r_.breaks)
    if (p > a && p < b) pts.push_back(p);
  std::sort(pts.begin() + 1, pts.end());
  pts.push_back(b);
  return pts;
}

cplx DeltaFunction::log_value(cplx z) const {
  const double x = z.real(), y = z.imag();
  if (y == 0.0 && x <= z0_) throw DomainError("delta_off: point lies on the cut (-inf, z0]");
  const double ninf = -std::numeric_limits<double>::infinity();
  cplx total;
  if (x < z0_ && std::abs(y) < 1.0) {
    // Subtract f(x) on a window symmetric about x to tame the near-singularity.
    const double d = std::min(z0_ - x, 1.0);
    const double fx = f(x);
    auto sub = [&](double s) { return cplx(f(s) - fx) / (cplx(s) - z); };
    auto plain = [&](double s) { return cplx(f(s)) / (cplx(s) - z); };
    std::vector<double> w = breaks_in(x - d, x);
    std::vector<double> w2 = breaks_in(x, x + d);
    total = gk_pieces(sub, w, tolerance) + gk_pieces(sub, w2, tolerance);
    total += fx * (std::log(cplx(x + d) - z) - std::log(cplx(x - d) - z));
    total += gk_pieces(plain, breaks_in(ninf, x - d), tolerance);
    if (x + d < z0_) total += gk_pieces(plain, breaks_in(x + d, z0_), tolerance);
  } else {
    auto plain = [&](double s) { return cplx(f(s)) / (cplx(s) - z); };
    total = gk_pieces(plain, breaks_in(ninf, z0_), tolerance);
  }
  return total / (2.0 * kPi * kI);
}

cplx DeltaFunction::operator()(cplx z) const { return std::exp(log_value(z)); }

double DeltaFunction::principal_value(double x) const {
  if (!(x < z0_ - exclusion)) throw DomainError("boundary value requested within the exclusion zone of z0");
  const double ninf = -std::numeric_limits<double>::infinity();
  const double d = std::min(z0_ - x, 1.0);
  const double fx = f(x);
  auto sub = [&](double s) { return (f(s) - fx) / (s - x); };
  auto plain = [&](double s) { return f(s) / (s - x); };
  double pv = gk_pieces(sub, breaks_in(x - d, x), tolerance) + gk_pieces(sub, breaks_in(x, x + d), tolerance);
  pv += gk_pieces(plain, breaks_in(ninf, x - d), tolerance);
  if (x + d < z0_) pv += gk_pieces(plain, breaks_in(x + d, z0_), tolerance);
  return pv;
}

cplx DeltaFunction::boundary(double x, int side) const {
  if (x > z0_) return (*this)(cplx(x, 0.0));
  const double pv = principal_value(x);
  cplx c = pv / (2.0 * kPi * kI) + (side > 0 ? 0.5 : -0.5) * f(x);
  return std::exp(c);
}

cplx DeltaFunction::product(double x) const {
  if (x > z0_) throw DomainError("Delta is defined on (-inf, z0)");
  return std::exp(principal_value(x) / (kPi * kI));
}

cplx DeltaFunction::product_continued(cplx z) const {
  if (!r_.analytic) throw DomainError("continuation needs an analytic reflection");
  if (z.imag() == 0.0) throw DomainError("continuation is evaluated off the real line");
  cplx d = (*this)(z);
  cplx m = 1.0 - r_.r(z) * r_.rbar(z);
  return z.imag() > 0.0 ? d * d / m : d * d * m;
}

cplx delta_off(const Reflection& r, double z0, cplx z) { return DeltaFunction(r, z0)(z); }

cplx delta_boundary(const Reflection& r, double z0, double x, int side) {
  return DeltaFunction(r, z0).boundary(x, side);
}

cplx capital_delta(const Reflection& r, double z0, double x) { return DeltaFunction(r, z0).product(x); }

double delta_l2_distance(const Reflection& r, double z0) {
  DeltaFunction d(r, z0);
  d.tolerance = 1e-10;
  // Log-graded composite Gauss-Legendre in u = log|x - z0| on [-18, 14]; the
  // integrand is bounded at z0 and decays like |x|^-2, so both cuts are harmless.
  std::vector<double> gx, gw;
  gauss_legendre(16, gx, gw);
  double out = 0.0;
  for (int side : {1, -1}) {
    double s = 0.0;
    for (int k = -18; k < 14; ++k) {
      for (std::size_t j = 0; j < gx.size(); ++j) {
        const double u = k + 0.5 * (1.0 + gx[j]);
        const double h = std::exp(u);
        const double w = 0.5 * gw[j] * h;
        s += w * std::norm(d.boundary(z0 - h, side) - 1.0);
        s += w * std::norm(d(cplx(z0 + h, 0.0)) - 1.0);
      }
    }
    out = std::max(out, std::sqrt(s));
  }
  return out;
}

ContinuationReport model_continuation_bounds(cplx r0, cplx z, double rho) {
  if (rho < 0.0) rho = std::abs(r0);
  if (!(std::abs(r0) <= rho && rho < 1.0)) throw DomainError("model continuation needs |r0| <= rho < 1");
  if (z.imag() == 0.0) throw DomainError("continuation bounds are stated off the real line");
  DeltaFunction d(Reflection::model(r0), 0.0, rho);
  ContinuationReport rep;
  rep.z = z;
  rep.rho = rho;
  rep.delta = d(z);
  rep.delta_sq = rep.delta * rep.delta;
  const double a = std::sqrt(1.0 - std::norm(r0));
  const double arg = std::arg(z);
  const double q = 1.0 - rho * rho;
  const double slack = 1e-10;
  if (z.imag() > 0.0) {
    rep.product = d.product_continued(z);
    rep.product_bound = std::abs((z + kI * a) / (z - kI * a)) / std::pow(q, 1.0 - arg / kPi);
    rep.delta_sq_bound = 1.0 / std::pow(q, arg / kPi);
    rep.unit_check = std::abs(rep.delta);
    rep.ok = std::abs(rep.product) <= rep.product_bound * (1 + slack) &&
             std::abs(1.0 / rep.delta_sq) <= rep.delta_sq_bound * (1 + slack) && rep.unit_check <= 1.0 + 1e-8;
  } else {
    rep.product = 1.0 / d.product_continued(z);
    rep.product_bound = std::abs((z - kI * a) / (z + kI * a)) / std::pow(q, 1.0 + arg / kPi);
    rep.delta_sq_bound = std::pow(q, arg / kPi);
    rep.unit_check = std::abs(1.0 / rep.delta);
    rep.ok = std::abs(rep.product) <= rep.product_bound * (1 + slack) &&
             std::abs(rep.delta_sq) <= rep.delta_sq_bound * (1 + slack) && rep.unit_check <= 1.0 + 1e-8;
  }
  return rep;
}

namespace {

cplx derivative(const Reflection& r, double s) {
  const double h = 1e-5 * (1.0 + std::abs(s));
  return (r.r(cplx(s + h)) - r.r(cplx(s - h))) / (2.0 * h);
}

std::vector<double> line_points(const Reflection& r) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> pts{-inf};
  std::vector<double> b = r.breaks;
  std::sort(b.begin(), b.end());
  pts.insert(pts.end(), b.begin(), b.end());
  if (b.empty()) pts.push_back(0.0);
  pts.push_back(inf);
  return pts;
}

}  // namespace

double l2_norm(const Reflection& r) {
  auto f = [&](double s) { return r.abs2(s); };
  return std::sqrt(gk_pieces(f, line_points(r), 1e-12));
}

double h1_norm(const Reflection& r) {
  auto f = [&](double s) { return r.abs2(s) + std::norm(derivative(r, s)); };
  return std::sqrt(gk_pieces(f, line_points(r), 1e-10));
}

}  // namespace rhp
