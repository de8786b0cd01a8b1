#include "rhp/deform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rhp {

cplx theta(cplx z, double x, double t) { return x * z - t * z * z; }

int signature(cplx z, double x, double t) {
  // Re(i theta) = -x Im z + 2 t Re z Im z.
  const double v = -x * z.imag() + 2.0 * t * z.real() * z.imag();
  return (v > 0.0) - (v < 0.0);
}

namespace {

Mat2 unipotent_upper(cplx a) {
  Mat2 m = Mat2::Identity();
  m(0, 1) = a;
  return m;
}

Mat2 unipotent_lower(cplx a) {
  Mat2 m = Mat2::Identity();
  m(1, 0) = a;
  return m;
}

Mat2 nls_matrix(cplx r, cplx rb, cplx e) {
  Mat2 m;
  m << 1.0 - r * rb, r * e, -rb / e, 1.0;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Conjugated jump

Mat2 BreveJump::eval(double z) const {
  const double s = z / scale;
  const cplx e = std::exp(kI * nls.theta(s));
  Mat2 v = nls_matrix(nls.r.r(s), nls.r.rbar(s), e);
  cplx dm, dp;
  if (s > delta.z0()) {
    dm = dp = delta(cplx(s, 0.0));
  } else {
    dm = delta.boundary(s, -1);
    dp = delta.boundary(s, 1);
  }
  return sigma3_pow(dm) * v * sigma3_pow(1.0 / dp);
}

Mat2 BreveJump::minus_factor(cplx z) const {
  const cplx s = z / scale;
  const bool real = s.imag() == 0.0;
  if (!real && !nls.r.analytic) throw DomainError("continuation unavailable for a non-analytic reflection");
  const cplx e = std::exp(kI * nls.theta(s));
  if (s.real() > delta.z0()) {
    cplx d = delta(s);
    return unipotent_upper(-nls.r.r(s) * e * d * d);
  }
  cplx D = real ? delta.product(s.real()) : delta.product_continued(s);
  return unipotent_lower(nls.r.rbar(s) / (e * D));
}

Mat2 BreveJump::plus_factor(cplx z) const {
  const cplx s = z / scale;
  const bool real = s.imag() == 0.0;
  if (!real && !nls.r.analytic) throw DomainError("continuation unavailable for a non-analytic reflection");
  const cplx e = std::exp(kI * nls.theta(s));
  if (s.real() > delta.z0()) {
    cplx d = delta(s);
    return unipotent_lower(-nls.r.rbar(s) / (e * d * d));
  }
  cplx D = real ? delta.product(s.real()) : delta.product_continued(s);
  return unipotent_upper(nls.r.r(s) * e * D);
}

JumpMatrix BreveJump::jump() const {
  BreveJump self = *this;
  PointFn f = [self](cplx z, std::size_t) -> Mat2 { return self.eval(z.real()); };
  return JumpMatrix::from(f, "breve");
}

BreveJump conjugate_by_delta(const JumpMatrix& v, const DeltaFunction& delta) {
  if (!v.nls) throw DomainError("conjugate_by_delta needs a jump of the NLS shape");
  const NlsData& d = *v.nls;
  if (d.t != 0.0 && std::abs(delta.z0() - d.x / (2.0 * d.t)) > 1e-12)
    throw DomainError("delta is centred away from the stationary point");
  for (double s : {-1.3, 0.4, 2.2})
    if (std::abs(d.r.r(s) - delta.reflection().r(s)) > 1e-12)
      throw DomainError("delta was built from a different reflection coefficient");
  return BreveJump{d, delta, 1.0};
}

Factorization breve_factorization(const BreveJump& v, FactorSide side) {
  BreveJump b = v;
  auto check = [b, side](cplx z) {
    const double s = z.real() / b.scale;
    const bool right = s > b.delta.z0();
    if (right != (side == FactorSide::right)) throw DomainError("factorization evaluated on the wrong side of z0");
  };
  if (side == FactorSide::right) {
    PointFn wm = [b, check](cplx z, std::size_t) -> Mat2 {
      check(z);
      return Mat2::Identity() - b.minus_factor(z);
    };
    PointFn wp = [b, check](cplx z, std::size_t) -> Mat2 {
      check(z);
      return b.plus_factor(z) - Mat2::Identity();
    };
    return {wm, wp, b.jump()};
  }
  // Left of z0 on the line: entries carry delta+-^{-+2} / (1 - |r|^2).
  PointFn wm = [b, check](cplx z, std::size_t) -> Mat2 {
    check(z);
    if (z.imag() != 0.0) return Mat2::Identity() - b.minus_factor(z);
    const double s = z.real() / b.scale;
    const cplx e = std::exp(kI * b.nls.theta(s));
    const cplx m = 1.0 - b.nls.r.abs2(s);
    if (std::abs(m) < 1e-14) throw DomainError("|r| = 1 makes the factorization singular");
    const cplx dm = b.delta.boundary(s, -1);
    Mat2 w = Mat2::Zero();
    w(1, 0) = -b.nls.r.rbar(s) / (e * dm * dm * m);
    return w;
  };
  PointFn wp = [b, check](cplx z, std::size_t) -> Mat2 {
    check(z);
    if (z.imag() != 0.0) return b.plus_factor(z) - Mat2::Identity();
    const double s = z.real() / b.scale;
    const cplx e = std::exp(kI * b.nls.theta(s));
    const cplx m = 1.0 - b.nls.r.abs2(s);
    if (std::abs(m) < 1e-14) throw DomainError("|r| = 1 makes the factorization singular");
    const cplx dp = b.delta.boundary(s, 1);
    Mat2 w = Mat2::Zero();
    w(0, 1) = b.nls.r.r(s) * e * dp * dp / m;
    return w;
  };
  return {wm, wp, b.jump()};
}

BreveJump scale(const BreveJump& v, double t) {
  if (!(t > 0.0)) throw DomainError("scale needs t > 0");
  if (v.nls.x != 0.0) throw DomainError("scale is applied after reduction to x = 0");
  BreveJump out = v;
  out.scale = v.scale * std::sqrt(t);
  return out;
}

// ---------------------------------------------------------------------------
// Lens

Mat2 LensedProblem::phi(cplx z, cplx probe) const {
  const double a = std::arg(probe);
  const double b = beta * kPi;
  if ((a > 0.0 && a < b) || (a > kPi - b)) return breve.plus_factor(z);
  if ((a < 0.0 && a > -b) || (a < -kPi + b)) return breve.minus_factor(z);
  return Mat2::Identity();
}

std::vector<std::size_t> LensedProblem::real_pieces() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < contour.pieces.size(); ++k) {
    cplx d = contour.pieces[k].axis();
    if (std::abs(d.imag()) < 1e-15) out.push_back(k);
  }
  return out;
}

Mat2 LensedProblem::conjugated(cplx z, std::size_t piece) const {
  const auto& p = contour.pieces.at(piece);
  const cplx n = kI * p.tangent();
  const double eps = 1e-7 * std::max(std::abs(z), 1e-300);
  const bool on_real = std::abs(p.axis().imag()) < 1e-15;
  Mat2 v = on_real ? breve.eval(z.real()) : Mat2(Mat2::Identity());
  Mat2 minus = phi(z, z - eps * n);
  Mat2 plus = phi(z, z + eps * n);
  return minus * v * plus.inverse();
}

JumpMatrix LensedProblem::jump() const {
  LensedProblem self = *this;
  auto real = real_pieces();
  auto on_real = [real](std::size_t k) { return std::find(real.begin(), real.end(), k) != real.end(); };
  PointFn f = [self, on_real](cplx z, std::size_t k) -> Mat2 {
    return on_real(k) ? Mat2(Mat2::Identity()) : self.conjugated(z, k);
  };
  PointFn fi = [self, on_real](cplx z, std::size_t k) -> Mat2 {
    return on_real(k) ? Mat2(Mat2::Identity()) : Mat2(self.conjugated(z, k).inverse());
  };
  return {f, fi, std::nullopt, "lensed"};
}

LensedProblem augment_and_lens(const BreveJump& v, double beta) {
  if (!v.nls.r.analytic) throw DomainError("lensing needs analytic continuations of r");
  return {build_augmented_cross(beta), v, beta};
}

// ---------------------------------------------------------------------------
// General reflection: g, approximants, G and H

Reflection model_reflection(const Reflection& r) {
  Reflection m = Reflection::model(r.r(0.0));
  m.name = "model";
  return m;
}

double GFunction::operator()(cplx z) const {
  if (z.imag() != 0.0 || z.real() >= 0.0) return 1.0;
  const double s = z.real();
  return std::sqrt((1.0 - r_sharp.abs2(s)) / (1.0 - r.abs2(s)));
}

double GFunction::derivative_l2() const {
  using boost::math::quadrature::gauss_kronrod;
  auto d = [this](double s) {
    const double h = 1e-5 * (1.0 + std::abs(s));
    const double a = (*this)(cplx(std::min(s + h, -1e-300), 0.0));
    const double b = (*this)(cplx(s - h, 0.0));
    return (a - b) * (a - b) / (4.0 * h * h);
  };
  std::vector<double> pts{-std::numeric_limits<double>::infinity()};
  std::vector<double> br;
  for (double b : r.breaks)
    if (b < 0.0) br.push_back(b);
  std::sort(br.begin(), br.end());
  pts.insert(pts.end(), br.begin(), br.end());
  pts.push_back(0.0);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    s += gauss_kronrod<double, 31>::integrate(d, pts[i], pts[i + 1], 12, 1e-9);
  return std::sqrt(s);
}

GFunction build_g(const Reflection& r, const Reflection& r_sharp) {
  if (!(r.sup < 1.0 && r_sharp.sup < 1.0)) throw DomainError("build_g needs |r|, |r#| <= rho < 1");
  return {r, r_sharp};
}

namespace {

// Rays bounding quadrant j, positively oriented: the first leaves 0 at angle
// (j-1) pi/2, the second returns to 0 at angle j pi/2.
std::pair<cplx, cplx> quadrant_rays(int j) {
  static const cplx dirs[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return {dirs[(j - 1) % 4], dirs[j % 4]};
}

}  // namespace

cplx ScalarApproximant::operator()(cplx z) const {
  using boost::math::quadrature::gauss_kronrod;
  const cplx w = std::polar(1.0, (2 * quadrant - 1) * kPi / 4);
  const cplx z1 = z + gamma * w, z2 = z - gamma * w;
  const auto [d_out, d_in] = quadrant_rays(quadrant);
  cplx total = 0.0;
  for (int leg = 0; leg < 2; ++leg) {
    const cplx d = leg == 0 ? d_out : d_in;
    auto f = [&](double u) {
      cplx s = d * u;
      return b(s) * (1.0 / (s - z1) - 1.0 / (s - z2)) * d;
    };
    // Break the ray where the kernel varies on the scale gamma.
    const double u0 = std::max(0.0, std::real(z * std::conj(d)));
    std::vector<double> pts{0.0};
    for (double m : {-100.0, -10.0, -1.0, 0.0, 1.0, 10.0, 100.0}) {
      double u = u0 + m * gamma;
      if (u > 0.0) pts.push_back(u);
    }
    if (std::abs(d.imag()) < 0.5)
      for (double bk : breaks) {
        double u = bk * d.real();
        if (u > 0.0) pts.push_back(u);
      }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    pts.push_back(std::numeric_limits<double>::infinity());
    cplx leg_sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      leg_sum += gauss_kronrod<double, 31>::integrate(f, pts[i], pts[i + 1], 10, tolerance);
    total += leg == 0 ? leg_sum : -leg_sum;
  }
  return total / (2.0 * kPi * kI);
}

namespace {

constexpr int kCheb = 16;

const std::vector<double>& cheb_points() {
  static const std::vector<double> x = [] {
    std::vector<double> out(kCheb);
    for (int k = 0; k < kCheb; ++k) out[k] = -std::cos(kPi * k / (kCheb - 1));
    return out;
  }();
  return x;
}

}  // namespace

HalfLineTable::HalfLineTable(const std::function<cplx(double)>& f, int side, std::vector<double> singular,
                             double lo, double hi)
    : side_(side > 0 ? 1 : -1) {
  std::vector<double> u{0.0};
  for (double s : singular)
    if (side_ * s > lo) u.push_back(side_ * s);
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  auto add = [this](double a, double b) {
    lo_.push_back(a);
    hi_.push_back(b);
  };
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double a = u[i], b = u[i + 1], h = 0.5 * (b - a);
    const int K = std::max(1, int(std::ceil(std::log2(h / lo))));
    for (int k = K; k >= 1; --k) add(a + h * std::ldexp(1.0, -k), a + h * std::ldexp(1.0, 1 - k));
    for (int k = 1; k <= K; ++k) add(b - h * std::ldexp(1.0, 1 - k), b - h * std::ldexp(1.0, -k));
  }
  const double a = u.back();
  for (double w = lo; a + w < hi; w *= 2.0) add(a + w, a + 2.0 * w);
  const auto& x = cheb_points();
  vals_.resize(lo_.size());
  for (std::size_t p = 0; p < lo_.size(); ++p) {
    vals_[p].resize(kCheb);
    const double c = 0.5 * (lo_[p] + hi_[p]), r = 0.5 * (hi_[p] - lo_[p]);
    for (int k = 0; k < kCheb; ++k) vals_[p][k] = f(side_ * (c + r * x[k]));
  }
}

cplx HalfLineTable::operator()(double xin) const {
  if (lo_.empty()) throw DomainError("empty table");
  const double u = side_ * xin;
  if (u <= lo_.front()) return vals_.front().front();
  if (u >= hi_.back()) return vals_.back().back();
  const std::size_t p = std::size_t(std::upper_bound(lo_.begin(), lo_.end(), u) - lo_.begin()) - 1;
  if (u > hi_[p]) {
    // In a gap around a singular point: nearest panel end.
    return (u - hi_[p] < lo_[p + 1] - u) ? vals_[p].back() : vals_[p + 1].front();
  }
  const double c = 0.5 * (lo_[p] + hi_[p]), r = 0.5 * (hi_[p] - lo_[p]);
  const double t = (u - c) / r;
  const auto& x = cheb_points();
  cplx num = 0.0;
  double den = 0.0;
  for (int k = 0; k < kCheb; ++k) {
    const double d = t - x[k];
    if (d == 0.0) return vals_[p][k];
    double w = (k % 2 ? -1.0 : 1.0) / d;
    if (k == 0 || k == kCheb - 1) w *= 0.5;
    num += w * vals_[p][k];
    den += w;
  }
  return num / den;
}

ScalarApproximant mollified_cauchy(int quadrant, std::function<cplx(cplx)> b, double gamma,
                                   std::vector<double> breaks) {
  if (!(gamma > 0.0)) throw DomainError("mollification needs gamma > 0");
  if (quadrant < 1 || quadrant > 4) throw DomainError("quadrant must be 1..4");
  ScalarApproximant a;
  a.quadrant = quadrant;
  a.gamma = gamma;
  a.b = std::move(b);
  a.breaks = std::move(breaks);
  return a;
}

double choose_gamma(double lambda, double rho, double beta, double c) {
  if (!(lambda >= 0.0)) throw DomainError("choose_gamma needs lambda >= 0");
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("choose_gamma needs 0 <= rho < 1");
  if (!(beta > 0.0 && beta < 0.5)) throw DomainError("choose_gamma needs beta in (0, 1/2)");
  const double sg = c * std::pow(1.0 - rho, 6.0 + 5.0 * beta) / (1.0 + lambda);
  const double g = sg * sg;
  if (!(g / 2.0 < 1.0)) throw NumericalError("choose_gamma produced gamma/2 >= 1", g);
  return g;
}

double default_epsilon(double rho, double beta) { return std::min(0.5, std::pow(1.0 - rho, 3.5 + 5.0 * beta)); }

Reduced translate_reduce(const Reflection& r, double x, double t) {
  if (t == 0.0) throw DomainError("translate_reduce needs t != 0");
  const double z0 = x / (2.0 * t);
  const cplx ph = std::exp(kI * t * z0 * z0);
  Reflection out = r;
  auto rr = r.r;
  auto rb = r.rbar;
  out.r = [rr, z0, ph](cplx z) { return rr(z + z0) * ph; };
  out.rbar = [rb, z0, ph](cplx z) { return rb(z + z0) / ph; };
  out.breaks.clear();
  for (double b : r.breaks) out.breaks.push_back(b - z0);
  return {out, 0.0, t, z0};
}

Reduced reflect_reduce(const Reflection& r, double x, double t) {
  if (!(t < 0.0)) throw DomainError("reflect_reduce needs t < 0");
  Reflection out = r;
  auto rr = r.r;
  auto rb = r.rbar;
  out.r = [rb](cplx z) { return rb(-z); };
  out.rbar = [rr](cplx z) { return rr(-z); };
  out.breaks.clear();
  for (double b : r.breaks) out.breaks.push_back(-b);
  return {out, x, -t, t != 0.0 ? x / (-2.0 * t) : 0.0};
}

DeformationPlan::DeformationPlan(Reflection r, double t, double beta, double gamma, double lambda)
    : r_(std::move(r)),
      rs_(model_reflection(r_)),
      t_(t),
      beta_(beta),
      gamma_(gamma),
      lambda_(lambda),
      rho_(r_.sup),
      delta_(r_, 0.0),
      delta_sharp_(rs_, 0.0, r_.sup),
      gfun_(build_g(r_, rs_)) {
  if (!(beta > 0.0 && beta < 0.5)) throw DomainError("beta must lie in (0, 1/2)");
  if (lambda_ < 0.0) lambda_ = h1_norm(r_);
  if (gamma_ < 0.0) gamma_ = choose_gamma(lambda_, rho_, beta_);
  const DeltaFunction d = delta_;
  delta_pos_ = std::make_shared<HalfLineTable>([d](double x) { return d(cplx(x, 0.0)); }, 1, r_.breaks);
  product_neg_ = std::make_shared<HalfLineTable>([d](double x) { return d.product(x); }, -1, r_.breaks);
  for (int j = 1; j <= 4; ++j) {
    diag_.push_back(approximant(j, true, gamma_));
    off_.push_back(approximant(j, false, gamma_));
  }
}

ScalarApproximant DeformationPlan::approximant(int j, bool diagonal, double gamma) const {
  if (diagonal) {
    GFunction gf = gfun_;
    return mollified_cauchy(j, [gf](cplx s) -> cplx { return gf(s); }, gamma, r_.breaks);
  }
  // Same entries as b_offdiag with delta and Delta read from the tables.
  Reflection r = r_, rs = rs_;
  GFunction gf = gfun_;
  auto dp = delta_pos_;
  auto pn = product_neg_;
  auto b = [j, r, rs, gf, dp, pn](cplx s) -> cplx {
    if (s.imag() != 0.0) return 0.0;
    const double x = s.real();
    if (std::abs(x) < 1e-8) return 0.0;
    if ((j == 1 || j == 4) && x < 0.0) return 0.0;
    if ((j == 2 || j == 3) && x > 0.0) return 0.0;
    switch (j) {
      case 1: {
        cplx d = (*dp)(x);
        return -(rs.rbar(x) - r.rbar(x)) / (d * d);
      }
      case 2: return -(rs.r(x) - r.r(x)) * (*pn)(x) / gf(x);
      case 3: return (rs.rbar(x) - r.rbar(x)) / (gf(x) * (*pn)(x));
      default: {
        cplx d = (*dp)(x);
        return (rs.r(x) - r.r(x)) * d * d;
      }
    }
  };
  return mollified_cauchy(j, b, gamma, r_.breaks);
}

Mat2 DeformationPlan::v_theta(double z) const {
  return nls_matrix(r_.r(z), r_.rbar(z), std::exp(kI * theta(z, 0.0, t_)));
}

namespace {

std::pair<cplx, cplx> delta_pair(const DeltaFunction& d, double z) {
  if (z > 0.0) {
    cplx v = d(cplx(z, 0.0));
    return {v, v};
  }
  return {d.boundary(z, -1), d.boundary(z, 1)};
}

}  // namespace

Mat2 DeformationPlan::v_breve(double z) const {
  auto [dm, dp] = delta_pair(delta_, z);
  return sigma3_pow(dm) * v_theta(z) * sigma3_pow(1.0 / dp);
}

Mat2 DeformationPlan::v_breve_sharp(double z) const {
  auto [dm, dp] = delta_pair(delta_sharp_, z);
  Mat2 v = nls_matrix(rs_.r(z), rs_.rbar(z), std::exp(kI * theta(z, 0.0, t_)));
  return sigma3_pow(dm) * v * sigma3_pow(1.0 / dp);
}

Mat2 DeformationPlan::v1(double z) const {
  auto [dm, dp] = delta_pair(delta_, z);
  auto [sm, sp] = delta_pair(delta_sharp_, z);
  return sigma3_pow(dm / sm) * v_breve_sharp(z) * sigma3_pow(sp / dp);
}

namespace {

enum class Axis { pos_real, neg_real, pos_imag, neg_imag };

Axis axis_of(cplx z) {
  if (std::abs(z.imag()) <= 1e-14 * std::abs(z)) {
    if (z.real() > 0.0) return Axis::pos_real;
    if (z.real() < 0.0) return Axis::neg_real;
  }
  if (std::abs(z.real()) <= 1e-14 * std::abs(z)) return z.imag() > 0.0 ? Axis::pos_imag : Axis::neg_imag;
  throw DomainError("point does not lie on the cross R u iR (or is 0)");
}

}  // namespace

int DeformationPlan::adjacent_quadrant(cplx z, int side) const {
  switch (axis_of(z)) {
    case Axis::pos_real: return side > 0 ? 1 : 4;
    case Axis::neg_real: return side > 0 ? 3 : 2;
    case Axis::pos_imag: return side > 0 ? 1 : 2;
    case Axis::neg_imag: return side > 0 ? 3 : 4;
  }
  return 1;
}

Mat2 DeformationPlan::v_e(cplx z) const {
  switch (axis_of(z)) {
    case Axis::pos_real: return v1(z.real());
    case Axis::neg_real: return v1(z.real()).inverse();
    default: return Mat2::Identity();
  }
}

Mat2 DeformationPlan::v2(cplx z) const {
  switch (axis_of(z)) {
    case Axis::pos_real: return v_breve(z.real());
    case Axis::neg_real: return v_breve(z.real()).inverse();
    default: return Mat2::Identity();
  }
}

cplx DeformationPlan::b_offdiag(int j, cplx s) const {
  if (s.imag() != 0.0) return 0.0;
  const double x = s.real();
  if (std::abs(x) < 1e-8) return 0.0;  // r - r# vanishes at 0
  const cplx dr = rs_.r(x) - r_.r(x);
  const cplx drb = rs_.rbar(x) - r_.rbar(x);
  switch (j) {
    case 1: {
      if (x < 0.0) return 0.0;
      cplx d = delta_(cplx(x, 0.0));
      return -drb / (d * d);
    }
    case 2: {
      if (x > 0.0) return 0.0;
      return -dr * delta_.product(x) / gfun_(x);
    }
    case 3: {
      if (x > 0.0) return 0.0;
      return drb / (gfun_(x) * delta_.product(x));
    }
    case 4: {
      if (x < 0.0) return 0.0;
      cplx d = delta_(cplx(x, 0.0));
      return dr * d * d;
    }
  }
  throw DomainError("quadrant must be 1..4");
}

Mat2 DeformationPlan::G_quadrant(int j, cplx z) const {
  const Axis a = axis_of(z);
  if (a == Axis::pos_imag || a == Axis::neg_imag) return Mat2::Identity();
  const double g = gfun_(z);
  const cplx e = std::exp(kI * theta(z, 0.0, t_));
  const cplx b = b_offdiag(j, z);
  Mat2 m = Mat2::Zero();
  switch (j) {
    case 1: m << g, 0.0, b / e, 1.0 / g; break;
    case 2: m << 1.0 / g, b * e, 0.0, g; break;
    case 3: m << 1.0 / g, 0.0, b / e, g; break;
    case 4: m << g, b * e, 0.0, 1.0 / g; break;
    default: throw DomainError("quadrant must be 1..4");
  }
  return m;
}

Mat2 DeformationPlan::H_quadrant(int j, cplx z) const {
  const cplx Hj = diag_[j - 1](z);
  const cplx hj = off_[j - 1](z);
  const cplx e = std::exp(kI * theta(z, 0.0, t_));
  Mat2 m = Mat2::Zero();
  switch (j) {
    case 1: m << Hj, 0.0, hj / e, 1.0 / Hj; break;
    case 2: m << 1.0 / Hj, hj * e, 0.0, Hj; break;
    case 3: m << 1.0 / Hj, 0.0, hj / e, Hj; break;
    case 4: m << Hj, hj * e, 0.0, 1.0 / Hj; break;
    default: throw DomainError("quadrant must be 1..4");
  }
  return m;
}

Mat2 DeformationPlan::G(cplx z, int side) const { return G_quadrant(adjacent_quadrant(z, side), z); }
Mat2 DeformationPlan::H(cplx z, int side) const { return H_quadrant(adjacent_quadrant(z, side), z); }

Mat2 DeformationPlan::R(cplx z, int side) const {
  Mat2 h = H(z, side);
  return side > 0 ? Mat2(h.inverse()) : h;
}

Mat2 DeformationPlan::v_H(cplx z) const { return H(z, -1) * v2(z) * H(z, 1); }

nlohmann::json DeformationPlan::stage_record(int samples) const {
  using nlohmann::json;
  json out;
  out["t"] = t_;
  out["beta"] = beta_;
  out["gamma"] = gamma_;
  out["lambda"] = lambda_;
  out["rho"] = rho_;
  out["r_sharp0"] = {rs_.r(0.0).real(), rs_.r(0.0).imag()};
  std::vector<cplx> pts;
  for (int k = 1; k <= samples; ++k) {
    double s = 0.25 * k;
    pts.push_back(s);
    pts.push_back(-s);
    pts.push_back(cplx(0.0, s));
    pts.push_back(cplx(0.0, -s));
  }
  auto entry = [](const Mat2& m) {
    json a = json::array();
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) a.push_back({m(r, c).real(), m(r, c).imag()});
    return a;
  };
  struct Stage {
    const char* name;
    std::function<Mat2(cplx)> f;
    bool real_only;
  };
  std::vector<Stage> stages = {
      {"v_theta", [this](cplx z) { return v_theta(z.real()); }, true},
      {"v_breve", [this](cplx z) { return v_breve(z.real()); }, true},
      {"v1", [this](cplx z) { return v1(z.real()); }, true},
      {"v_e", [this](cplx z) { return v_e(z); }, false},
      {"v2", [this](cplx z) { return v2(z); }, false},
      {"v_H", [this](cplx z) { return v_H(z); }, false},
      {"G_plus", [this](cplx z) { return G(z, 1); }, false},
      {"G_minus", [this](cplx z) { return G(z, -1); }, false},
      {"H_plus", [this](cplx z) { return H(z, 1); }, false},
      {"H_minus", [this](cplx z) { return H(z, -1); }, false},
  };
  json js = json::array();
  for (const auto& st : stages) {
    json rec;
    rec["name"] = st.name;
    json smp = json::array();
    double sup = 0.0;
    for (cplx z : pts) {
      if (st.real_only && z.imag() != 0.0) continue;
      Mat2 m = st.f(z);
      sup = std::max(sup, frob(m - Mat2::Identity()));
      smp.push_back({{"z", {z.real(), z.imag()}}, {"value", entry(m)}});
    }
    rec["sup_minus_identity"] = sup;
    rec["samples"] = smp;
    js.push_back(rec);
  }
  out["stages"] = js;
  json env = json::array();
  for (cplx z : pts) {
    env.push_back({{"z", {z.real(), z.imag()}},
                   {"g", gfun_(z)},
                   {"R_plus_norm", frob(R(z, 1))},
                   {"R_minus_norm", frob(R(z, -1))}});
  }
  out["conjugators"] = env;
  return out;
}

// ---------------------------------------------------------------------------
// Model pipeline

Mat2 DeformedSolution::minus_on_real(double x) const {
  if (x == 0.0) throw DomainError("the undeformed solution is not evaluated at the stationary point");
  const double sc = lens.breve.scale;
  const double z = sc * x;
  // v-hat = I on the real axis, so m-hat is continuous there; approach from below.
  const cplx zz(z, -1e-12 * std::max(1.0, std::abs(z)));
  Mat2 mhat = extend(hat, zz, false);
  Mat2 mbreve = mhat * lens.breve.minus_factor(cplx(z, 0.0));
  const DeltaFunction& d = lens.breve.delta;
  cplx dm = x > d.z0() ? d(cplx(x, 0.0)) : d.boundary(x, -1);
  return mbreve * sigma3_pow(dm);
}

DeformedSolution solve_deformed(const Reflection& r, double t, const DeformOptions& opt, SolveOptions sopt) {
  if (!(t > 0.0)) throw DomainError("the deformed route needs t > 0");
  if (!r.analytic) throw DomainError("the deformed route needs analytic continuations of r");
  DeltaFunction delta(r, 0.0);
  JumpMatrix v = nls_jump(r, 0.0, t);
  BreveJump bt = scale(conjugate_by_delta(v, delta), t);
  LensedProblem lens = augment_and_lens(bt, opt.beta);
  GridPtr grid = discretize(lens.contour, opt.n, opt.R, opt.grid);
  CauchyPair c(grid);
  RHPSolution hat = solve_normalized(c, lens.jump(), 2.0, sopt);
  DeformedSolution out{std::move(lens), t, grid, std::move(hat)};
  return out;
}

}  // namespace rhp
