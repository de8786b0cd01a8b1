#include "rhp/jump.hpp"

#include <algorithm>
#include <cmath>

namespace rhp {

Reflection Reflection::zero() {
  return {[](cplx) { return cplx(0.0); }, [](cplx) { return cplx(0.0); }, 0.0, "zero", true, {}};
}

Reflection Reflection::model(cplx r0) {
  Reflection out;
  out.r = [r0](cplx z) { return r0 / (1.0 + kI * z); };
  out.rbar = [r0](cplx z) { return std::conj(r0) / (1.0 - kI * z); };
  out.sup = std::abs(r0);
  out.name = "model";
  out.analytic = true;
  return out;
}

Reflection Reflection::indicator(double rho, double a, double z0) {
  if (!(a < z0)) throw DomainError("indicator support needs a < z0");
  Reflection out;
  auto f = [rho, a, z0](cplx z) { return (z.real() >= a && z.real() <= z0) ? cplx(rho) : cplx(0.0); };
  out.r = f;
  out.rbar = f;
  out.sup = std::abs(rho);
  out.name = "indicator";
  out.breaks = {a, z0};
  return out;
}

Reflection Reflection::rational(std::vector<cplx> res, std::vector<cplx> poles) {
  if (res.size() != poles.size()) throw DomainError("residues and poles differ in length");
  for (cplx p : poles)
    if (p.imag() == 0.0) throw DomainError("rational reflection poles must be off the real line");
  Reflection out;
  out.r = [res, poles](cplx z) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < res.size(); ++k) s += res[k] / (z - poles[k]);
    return s;
  };
  out.rbar = [res, poles](cplx z) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < res.size(); ++k) s += std::conj(res[k]) / (z - std::conj(poles[k]));
    return s;
  };
  // Sup on the line by sampling a fine mapped grid.
  double m = 0.0;
  for (int i = -20000; i <= 20000; ++i) m = std::max(m, std::abs(out.r(std::tan(kPi / 2 * i / 20001.0))));
  out.sup = m;
  out.name = "rational";
  out.analytic = true;
  return out;
}

Reflection Reflection::scaled(double gamma) const {
  Reflection out;
  auto rr = r;
  auto rb = rbar;
  out.r = [rr, gamma](cplx z) { return gamma * rr(z); };
  out.rbar = [rb, gamma](cplx z) { return gamma * rb(z); };
  out.sup = std::abs(gamma) * sup;
  out.name = name;
  out.analytic = analytic;
  out.breaks = breaks;
  return out;
}

JumpMatrix JumpMatrix::identity() {
  PointFn id = [](cplx, std::size_t) -> Mat2 { return Mat2::Identity(); };
  return {id, id, std::nullopt, "identity"};
}

JumpMatrix JumpMatrix::from(PointFn v, std::string label) {
  PointFn inv = [v](cplx z, std::size_t k) -> Mat2 { return v(z, k).inverse(); };
  return {std::move(v), inv, std::nullopt, std::move(label)};
}

JumpMatrix JumpMatrix::inverse() const { return {inv_eval, eval, std::nullopt, label + "^-1"}; }

GridFunction JumpMatrix::sample(GridPtr g) const {
  GridFunction out(g);
  for (std::size_t j = 0; j < g->size(); ++j) out.values[j] = eval(g->node(j), g->piece_of(j));
  return out;
}

GridFunction JumpMatrix::sample_inverse(GridPtr g) const {
  GridFunction out(g);
  for (std::size_t j = 0; j < g->size(); ++j) out.values[j] = inv_eval(g->node(j), g->piece_of(j));
  return out;
}

Factorization LowerDiagUpper::as_factorization() const {
  auto lo = lower;
  auto d = diag;
  auto up = upper;
  PointFn wm = [lo](cplx z, std::size_t k) -> Mat2 { return Mat2::Identity() - lo(z, k).inverse(); };
  PointFn wp = [d, up](cplx z, std::size_t k) -> Mat2 { return d(z, k) * up(z, k) - Mat2::Identity(); };
  return {wm, wp, parent};
}

CauchyPair::CauchyPair(GridPtr g) : grid(g) {
  auto pr = boundary_pair(std::move(g));
  plus = std::move(pr.first.matrix);
  minus = std::move(pr.second.matrix);
}

JumpMatrix nls_jump(const Reflection& r, double x, double t) {
  if (!(r.sup < 1.0)) throw DomainError("nls_jump needs sup|r| < 1");
  NlsData d{r, x, t};
  PointFn v = [d](cplx z, std::size_t) -> Mat2 {
    cplx a = d.r.r(z), b = d.r.rbar(z);
    cplx e = std::exp(kI * d.theta(z));
    Mat2 m;
    m << 1.0 - a * b, a * e, -b / e, 1.0;
    return m;
  };
  PointFn vi = [d](cplx z, std::size_t) -> Mat2 {
    cplx a = d.r.r(z), b = d.r.rbar(z);
    cplx e = std::exp(kI * d.theta(z));
    Mat2 m;  // det = 1
    m << 1.0, -a * e, b / e, 1.0 - a * b;
    return m;
  };
  return {v, vi, d, "nls"};
}

Factorization trivial_factorization(const JumpMatrix& v) {
  auto e = v.eval;
  PointFn zero = [](cplx, std::size_t) -> Mat2 { return Mat2::Zero(); };
  PointFn wp = [e](cplx z, std::size_t k) -> Mat2 { return e(z, k) - Mat2::Identity(); };
  return {zero, wp, v};
}

Factorization factor_upper_lower(const JumpMatrix& v) {
  if (!v.nls) throw DomainError("factor_upper_lower needs a jump of the NLS shape");
  NlsData d = *v.nls;
  PointFn wm = [d](cplx z, std::size_t) -> Mat2 {
    Mat2 m = Mat2::Zero();
    m(0, 1) = d.r.r(z) * std::exp(kI * d.theta(z));
    return m;
  };
  PointFn wp = [d](cplx z, std::size_t) -> Mat2 {
    Mat2 m = Mat2::Zero();
    m(1, 0) = -d.r.rbar(z) * std::exp(-kI * d.theta(z));
    return m;
  };
  return {wm, wp, v};
}

LowerDiagUpper factor_lower_upper(const JumpMatrix& v) {
  if (!v.nls) throw DomainError("factor_lower_upper needs a jump of the NLS shape");
  NlsData d = *v.nls;
  auto one_minus = [d](cplx z) {
    cplx m = 1.0 - d.r.r(z) * d.r.rbar(z);
    if (std::abs(m) < 1e-14) throw DomainError("factor_lower_upper: |r| = 1 makes the middle factor singular");
    return m;
  };
  PointFn lo = [d, one_minus](cplx z, std::size_t) -> Mat2 {
    Mat2 m = Mat2::Identity();
    m(1, 0) = -d.r.rbar(z) * std::exp(-kI * d.theta(z)) / one_minus(z);
    return m;
  };
  PointFn dg = [one_minus](cplx z, std::size_t) -> Mat2 { return sigma3_pow(one_minus(z)); };
  PointFn up = [d, one_minus](cplx z, std::size_t) -> Mat2 {
    Mat2 m = Mat2::Identity();
    m(0, 1) = d.r.r(z) * std::exp(kI * d.theta(z)) / one_minus(z);
    return m;
  };
  return {lo, dg, up, v};
}

MatX right_multiply_blocks(const MatX& a, const std::vector<Mat2>& m) {
  const Eigen::Index n = a.rows();
  MatX out(2 * n, 2 * n);
  for (int c = 0; c < 2; ++c) {
    for (int ai = 0; ai < 2; ++ai) {
      VecX d(n);
      for (Eigen::Index j = 0; j < n; ++j) d[j] = m[j](ai, c);
      out.block(c * n, ai * n, n, n) = a * d.asDiagonal();
    }
  }
  return out;
}

namespace {

std::vector<Mat2> sample_fn(const CollocationGrid& g, const PointFn& f) {
  std::vector<Mat2> out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = f(g.node(j), g.piece_of(j));
  return out;
}

}  // namespace

DenseOperator assemble_Cv(const CauchyPair& c, const JumpMatrix& v) {
  auto vm = sample_fn(*c.grid, v.eval);
  for (auto& m : vm) m -= Mat2::Identity();
  return {right_multiply_blocks(c.minus, vm), c.grid, "Cv", 2};
}

DenseOperator assemble_Cw(const CauchyPair& c, const Factorization& w) {
  auto wm = sample_fn(*c.grid, w.w_minus);
  auto wp = sample_fn(*c.grid, w.w_plus);
  MatX m = right_multiply_blocks(c.plus, wm) + right_multiply_blocks(c.minus, wp);
  return {std::move(m), c.grid, "Cw", 2};
}

MatX dual_plus(const CauchyPair& c) {
  const auto& g = *c.grid;
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  // Oriented line elements of the pairing int tr(f g^T) dz.
  VecX d(n);
  for (Eigen::Index j = 0; j < n; ++j) d[j] = double(g.orientation_of(std::size_t(j))) * g.dz(std::size_t(j));
  return -(d.cwiseInverse().asDiagonal() * c.minus.transpose() * d.asDiagonal());
}

DenseOperator dual_Cv(const CauchyPair& c, const JumpMatrix& v, DualBoundary how) {
  const auto& g = *c.grid;
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  auto vm = sample_fn(g, v.eval);
  const MatX cp = how == DualBoundary::adjoint ? dual_plus(c) : c.plus;
  MatX out(2 * n, 2 * n);
  for (int cc = 0; cc < 2; ++cc) {
    for (int a = 0; a < 2; ++a) {
      VecX d(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        Mat2 m = Mat2::Identity() - vm[j].transpose();
        d[j] = m(a, cc);
      }
      out.block(cc * n, a * n, n, n) = d.asDiagonal() * cp;
    }
  }
  return {std::move(out), c.grid, "Cv_dual", 2};
}

double mnorm(const JumpMatrix& v, const CollocationGrid& g) {
  double m = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    m = std::max(m, frob(v.eval(g.node(j), g.piece_of(j))));
    m = std::max(m, frob(v.inv_eval(g.node(j), g.piece_of(j))));
  }
  return m;
}

JumpMatrix invert_on(const JumpMatrix& v, const std::vector<std::size_t>& pieces) {
  auto in = [pieces](std::size_t k) { return std::find(pieces.begin(), pieces.end(), k) != pieces.end(); };
  auto e = v.eval, ie = v.inv_eval;
  PointFn f = [e, ie, in](cplx z, std::size_t k) -> Mat2 { return in(k) ? ie(z, k) : e(z, k); };
  PointFn fi = [e, ie, in](cplx z, std::size_t k) -> Mat2 { return in(k) ? e(z, k) : ie(z, k); };
  return {f, fi, std::nullopt, v.label + "_reoriented"};
}

Factorization reverse_factorization(const Factorization& w, const std::vector<std::size_t>& pieces) {
  auto in = [pieces](std::size_t k) { return std::find(pieces.begin(), pieces.end(), k) != pieces.end(); };
  auto wm = w.w_minus, wp = w.w_plus;
  PointFn nm = [wm, wp, in](cplx z, std::size_t k) -> Mat2 { return in(k) ? Mat2(-wp(z, k)) : wm(z, k); };
  PointFn np = [wm, wp, in](cplx z, std::size_t k) -> Mat2 { return in(k) ? Mat2(-wm(z, k)) : wp(z, k); };
  return {nm, np, invert_on(w.parent, pieces)};
}

}  // namespace rhp
