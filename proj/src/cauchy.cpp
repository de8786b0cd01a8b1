#include "rhp/cauchy.hpp"

#include <cmath>

#include "rhp/panel.hpp"

namespace rhp {

namespace {
const cplx kTwoPiI(0.0, 2.0 * kPi);
}

CauchyKernel::CauchyKernel(GridPtr grid) : grid_(std::move(grid)) {
  const auto& g = *grid_;
  pole_weights_.resize(g.panels().size());
  for (std::size_t p = 0; p < g.panels().size(); ++p) {
    const Panel& pan = g.panels()[p];
    if (g.contour().pieces[pan.piece].kind != PieceKind::ray || g.infinite_ray(pan.piece)) continue;
    const PanelRule& rule = panel_rule(pan.count);
    pole_weights_[p].resize(pan.count);
    double bl = (g.map_pole(pan.piece) - pan.center()) / pan.half();
    cauchy_weights(rule, bl, false, pole_weights_[p].data());
  }
}

// Geometric (unoriented) weights of int h(s) ds / (s - z) / (2 pi i). With
// self >= 0 the target is that node and its own panel is taken as a
// principal value.
void CauchyKernel::fill(cplx z, long self, cplx* out) const {
  const auto& g = *grid_;
  cplx w[64];
  for (std::size_t p = 0; p < g.panels().size(); ++p) {
    const Panel& pan = g.panels()[p];
    const PanelRule& rule = panel_rule(pan.count);
    const std::size_t k = pan.piece;
    const bool same_piece = self >= 0 && g.piece_of(static_cast<std::size_t>(self)) == k;
    cplx zeta = same_piece ? cplx(g.param(static_cast<std::size_t>(self)), 0.0) : g.preimage(k, z);
    const bool own = self >= 0 && static_cast<std::size_t>(self) >= pan.first &&
                     static_cast<std::size_t>(self) < pan.first + pan.count;
    cplx* o = out + pan.first;
    const bool ray = g.contour().pieces[k].kind == PieceKind::ray;
    const double b = g.map_pole(k);
    if (std::isinf(zeta.real()) || std::isinf(zeta.imag())) {
      // z sits where the ray map sends infinity: only the pole term survives.
      for (int j = 0; j < pan.count; ++j) {
        double u = pan.center() + pan.half() * rule.x[j];
        if (!ray) o[j] = 0.0;
        else if (g.infinite_ray(k)) o[j] = rule.w[j] * pan.half() / (b - u) / kTwoPiI;
        else o[j] = -pole_weights_[p][j] / kTwoPiI;
      }
      continue;
    }
    cplx zl = (zeta - pan.center()) / pan.half();
    cauchy_weights(rule, zl, own, w);
    if (!ray) {
      for (int j = 0; j < pan.count; ++j) o[j] = w[j] / kTwoPiI;
    } else if (g.infinite_ray(k)) {
      for (int j = 0; j < pan.count; ++j) {
        double u = pan.center() + pan.half() * rule.x[j];
        o[j] = w[j] * (b - zeta) / (b - u) / kTwoPiI;
      }
    } else {
      const auto& pw = pole_weights_[p];
      for (int j = 0; j < pan.count; ++j) o[j] = (w[j] - pw[j]) / kTwoPiI;
    }
  }
}

Eigen::RowVectorXcd CauchyKernel::row(cplx z) const {
  Eigen::RowVectorXcd r(grid_->size());
  fill(z, -1, r.data());
  for (std::size_t j = 0; j < grid_->size(); ++j) r[j] *= double(grid_->orientation_of(j));
  return r;
}

Eigen::RowVectorXcd CauchyKernel::pv_row(std::size_t i) const {
  Eigen::RowVectorXcd r(grid_->size());
  fill(grid_->node(i), static_cast<long>(i), r.data());
  for (std::size_t j = 0; j < grid_->size(); ++j) r[j] *= double(grid_->orientation_of(j));
  return r;
}

MatX CauchyKernel::geometric_pv_matrix() const {
  const std::size_t n = grid_->size();
  // Column-major storage: fill transposed rows then transpose once.
  MatX kt(n, n);
  for (std::size_t i = 0; i < n; ++i) fill(grid_->node(i), static_cast<long>(i), kt.col(i).data());
  return kt.transpose();
}

std::pair<DenseOperator, DenseOperator> boundary_pair(GridPtr grid) {
  CauchyKernel ker(grid);
  MatX k = ker.geometric_pv_matrix();
  const std::size_t n = grid->size();
  for (std::size_t j = 0; j < n; ++j)
    if (grid->orientation_of(j) < 0) k.col(j) = -k.col(j);
  DenseOperator plus{k, grid, "Cplus", 1}, minus{std::move(k), grid, "Cminus", 1};
  plus.matrix.diagonal().array() += 0.5;
  minus.matrix.diagonal().array() -= 0.5;
  return {std::move(plus), std::move(minus)};
}

DenseOperator boundary_matrix(GridPtr grid, int side) {
  auto pr = boundary_pair(std::move(grid));
  return side > 0 ? std::move(pr.first) : std::move(pr.second);
}

GridFunction apply(const DenseOperator& op, const GridFunction& f) {
  if (op.block != 1) throw DomainError("apply expects a scalar operator");
  const std::size_t n = f.size();
  MatX x(n, 4);
  for (std::size_t j = 0; j < n; ++j)
    for (int e = 0; e < 4; ++e) x(j, e) = f.values[j](e / 2, e % 2);
  MatX y = op.matrix * x;
  GridFunction out(f.grid);
  for (std::size_t j = 0; j < n; ++j)
    for (int e = 0; e < 4; ++e) out.values[j](e / 2, e % 2) = y(j, e);
  return out;
}

Mat2 cauchy_eval(const GridFunction& h, cplx z) {
  CauchyKernel ker(h.grid);
  Eigen::RowVectorXcd r = ker.row(z);
  Mat2 s = Mat2::Zero();
  for (std::size_t j = 0; j < h.size(); ++j) s += r[j] * h.values[j];
  return s;
}

Mat2 cauchy_off(const GridFunction& h, cplx z) {
  const auto& g = *h.grid;
  double d = g.contour().distance(z);
  if (std::isinf(g.truncation_radius()) || std::abs(z) <= g.truncation_radius()) {
    if (d <= g.local_spacing_near(z)) throw DomainError("evaluation point closer to the contour than the node spacing");
  }
  return cauchy_eval(h, z);
}

DenseOperator hilbert_matrix(GridPtr grid) {
  auto [p, m] = boundary_pair(grid);
  DenseOperator h{-(p.matrix + m.matrix), grid, "Hilbert", 1};
  return h;
}

GridFunction hilbert(const GridFunction& h) { return apply(hilbert_matrix(h.grid), h); }

GridFunction product_density(const GridFunction& f, const GridFunction& g) {
  auto hm = hilbert_matrix(f.grid);
  GridFunction hf = apply(hm, f), hg = apply(hm, g);
  GridFunction out(f.grid);
  for (std::size_t j = 0; j < f.size(); ++j) out.values[j] = -0.5 * (hf.values[j] * g.values[j] + f.values[j] * hg.values[j]);
  return out;
}

VecX row_stack(const GridFunction& f, int r) {
  const std::size_t n = f.size();
  VecX v(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    v[j] = f.values[j](r, 0);
    v[n + j] = f.values[j](r, 1);
  }
  return v;
}

void row_unstack(GridFunction& f, int r, const VecX& v) {
  const std::size_t n = f.size();
  for (std::size_t j = 0; j < n; ++j) {
    f.values[j](r, 0) = v[j];
    f.values[j](r, 1) = v[n + j];
  }
}

}  // namespace rhp
