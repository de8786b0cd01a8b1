#include "rhp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rhp/panel.hpp"

namespace rhp {

CollocationGrid::CollocationGrid(Contour contour, int n, double R, GridOptions opt)
    : contour_(std::move(contour)), n_(n), R_(R), opt_(opt) {
  if (n < 8) throw DomainError("discretize needs at least 8 points per piece");
  if (!(R > 0.0)) throw DomainError("truncation radius must be positive");
  if (opt_.panel_order < 4 || opt_.panel_order > 32) throw DomainError("panel order must lie in [4, 32]");
  const std::size_t np = contour_.pieces.size();
  a_.assign(np, 0.0);
  b_.assign(np, kInf);
  begin_.push_back(0);
  for (std::size_t k = 0; k < np; ++k) {
    const auto& piece = contour_.pieces[k];
    bool ray = piece.kind == PieceKind::ray;
    if (ray) {
      if (std::isinf(R_)) {
        a_[k] = opt_.ray_scale;
        b_[k] = 1.0;
      } else {
        double L = std::min(opt_.ray_scale, R_ / 4.0);
        b_[k] = R_ / (R_ - 2.0 * L);
        a_[k] = L * b_[k];
      }
    }
    int q = std::min(opt_.panel_order, n);
    int m = (n + q - 1) / q;
    int base = n / m, extra = n % m;
    std::vector<double> brk(m + 1);
    for (int i = 0; i <= m; ++i) {
      double t = double(i) / m;
      brk[i] = ray ? -1.0 + 2.0 * std::pow(t, opt_.vertex_grading) : -1.0 + 2.0 * t;
    }
    for (int i = 0; i < m; ++i) {
      int cnt = base + (i >= m - extra ? 1 : 0);
      Panel pan{k, nodes_.size(), cnt, brk[i], brk[i + 1]};
      const PanelRule& rule = panel_rule(cnt);
      for (int j = 0; j < cnt; ++j) {
        double u = pan.center() + pan.half() * rule.x[j];
        cplx s = map(k, u), sp = map_prime(k, u);
        nodes_.push_back(s);
        u_.push_back(u);
        dz_.push_back(rule.w[j] * pan.half() * sp);
        weights_.push_back(rule.w[j] * pan.half() * std::abs(sp));
        piece_.push_back(k);
      }
      panels_.push_back(pan);
    }
    begin_.push_back(nodes_.size());
  }
}

bool CollocationGrid::infinite_ray(std::size_t k) const {
  return contour_.pieces[k].kind == PieceKind::ray && std::isinf(R_);
}

cplx CollocationGrid::map(std::size_t k, double u) const {
  const auto& p = contour_.pieces[k];
  if (p.kind == PieceKind::segment) return p.start + (p.end_or_dir - p.start) * (0.5 * (1.0 + u));
  return p.start + p.end_or_dir * (a_[k] * (1.0 + u) / (b_[k] - u));
}

cplx CollocationGrid::map_prime(std::size_t k, double u) const {
  const auto& p = contour_.pieces[k];
  if (p.kind == PieceKind::segment) return 0.5 * (p.end_or_dir - p.start);
  double d = b_[k] - u;
  return p.end_or_dir * (a_[k] * (b_[k] + 1.0) / (d * d));
}

cplx CollocationGrid::preimage(std::size_t k, cplx z) const {
  const auto& p = contour_.pieces[k];
  if (p.kind == PieceKind::segment) return 2.0 * (z - p.start) / (p.end_or_dir - p.start) - 1.0;
  cplx tau = (z - p.start) / p.end_or_dir;
  cplx den = a_[k] + tau;
  if (std::abs(den) < 1e-300) return cplx(kInf, 0.0);
  return (tau * b_[k] - a_[k]) / den;
}

double CollocationGrid::local_spacing_near(cplx z) const {
  std::size_t best = 0;
  double d = kInf;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    double dj = std::abs(nodes_[j] - z);
    if (dj < d) {
      d = dj;
      best = j;
    }
  }
  return weights_[best];
}

GridPtr discretize(const Contour& contour, int n, double R, GridOptions opt) {
  return std::make_shared<const CollocationGrid>(contour, n, R, opt);
}

GridFunction::GridFunction(GridPtr g, std::vector<Mat2> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size()) throw DomainError("grid function length mismatch");
}

GridFunction GridFunction::sample(GridPtr g, const std::function<Mat2(cplx)>& f) {
  GridFunction out(g);
  for (std::size_t j = 0; j < g->size(); ++j) out.values[j] = f(g->node(j));
  return out;
}

GridFunction GridFunction::sample_scalar(GridPtr g, const std::function<cplx(cplx)>& f) {
  return sample(g, [&](cplx z) -> Mat2 { return f(z) * Mat2::Identity(); });
}

GridFunction GridFunction::constant(GridPtr g, const Mat2& m) {
  return GridFunction(g, std::vector<Mat2>(g->size(), m));
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  for (std::size_t j = 0; j < values.size(); ++j) values[j] += o.values[j];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  for (std::size_t j = 0; j < values.size(); ++j) values[j] -= o.values[j];
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  for (auto& v : values) v *= s;
  return *this;
}

GridFunction GridFunction::times(const GridFunction& o) const {
  GridFunction out(grid);
  for (std::size_t j = 0; j < values.size(); ++j) out.values[j] = values[j] * o.values[j];
  return out;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm needs p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, frob(v));
    return m;
  }
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f.grid->weight(j) * std::pow(frob(f.values[j]), p);
  return std::pow(s, 1.0 / p);
}

cplx integrate(const CollocationGrid& g, const std::function<cplx(cplx)>& f) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) s += g.weight(j) * f(g.node(j));
  return s;
}

double ray_tail_l1(const Contour& c, double R, const std::function<double(cplx)>& absf) {
  if (std::isinf(R)) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (const auto& p : c.pieces) {
    if (p.kind != PieceKind::ray) continue;
    auto f = [&](double s) { return absf(p.start + p.end_or_dir * s); };
    total += gauss_kronrod<double, 31>::integrate(f, R, std::numeric_limits<double>::infinity(), 15, 1e-13);
  }
  return total;
}

void write_csv(std::ostream& os, const GridFunction& f) {
  os << "piece,re_node,im_node,weight,re_v11,im_v11,re_v12,im_v12,re_v21,im_v21,re_v22,im_v22\n";
  os << std::setprecision(17);
  const auto& g = *f.grid;
  for (std::size_t j = 0; j < g.size(); ++j) {
    os << g.piece_of(j) << ',' << g.node(j).real() << ',' << g.node(j).imag() << ',' << g.weight(j);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) os << ',' << f.values[j](r, c).real() << ',' << f.values[j](r, c).imag();
    os << '\n';
  }
}

}  // namespace rhp
