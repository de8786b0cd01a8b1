#pragma once

#include <string>

#include "rhp/grid.hpp"

namespace rhp {

/// Dense discrete operator on a grid. Scalar operators (block = 1) act on each
/// matrix entry separately; block = 2 operators act on row-stacked densities
/// [m_1 at all nodes, m_2 at all nodes] for one row of a 2x2 density.
struct DenseOperator {
  MatX matrix;
  GridPtr grid;
  std::string label;
  int block = 1;
};

/// Cauchy integral weights for one target. Row entries are oriented, so
/// (Ch)(z) = sum_j row[j] h_j, the integral of h(s)/(s-z) ds/(2 pi i).
class CauchyKernel {
 public:
  explicit CauchyKernel(GridPtr grid);
  const CollocationGrid& grid() const { return *grid_; }
  /// Row for an off-contour point.
  Eigen::RowVectorXcd row(cplx z) const;
  /// Principal-value row for the node with index i (orientation applied, no jump term).
  Eigen::RowVectorXcd pv_row(std::size_t i) const;
  /// Unoriented principal-value matrix (geometric direction of every piece).
  MatX geometric_pv_matrix() const;

 private:
  void fill(cplx z, long self, cplx* out) const;
  GridPtr grid_;
  std::vector<Eigen::VectorXcd> pole_weights_;  // per panel, at the ray-map pole
};

/// Boundary value matrix C+ (side = +1) or C- (side = -1); C+ - C- = I exactly.
DenseOperator boundary_matrix(GridPtr grid, int side);

/// Both boundary matrices from one kernel assembly.
std::pair<DenseOperator, DenseOperator> boundary_pair(GridPtr grid);

/// Scalar operator applied entrywise to a matrix-valued density.
GridFunction apply(const DenseOperator& op, const GridFunction& f);

/// Cauchy transform off the contour. Rejects z closer than the local node spacing.
Mat2 cauchy_off(const GridFunction& h, cplx z);
/// Same transform without the proximity guard (near-singular panels are integrated exactly).
Mat2 cauchy_eval(const GridFunction& h, cplx z);

/// H = -(C+ + C-).
GridFunction hilbert(const GridFunction& h);
DenseOperator hilbert_matrix(GridPtr grid);

/// Density h with (Cf)(Cg) = Ch off the contour: h = -((Hf)g + f(Hg))/2.
GridFunction product_density(const GridFunction& f, const GridFunction& g);

/// Row-stacked layout helpers for block = 2 operators.
VecX row_stack(const GridFunction& f, int r);
void row_unstack(GridFunction& f, int r, const VecX& v);

}  // namespace rhp
