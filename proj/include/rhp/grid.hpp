#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <vector>

#include "rhp/contour.hpp"

namespace rhp {

struct GridOptions {
  /// Median node distance from the vertex on rays (the map sends u=0 there).
  double ray_scale = 1.0;
  /// Panel breakpoints on rays sit at -1 + 2 (k/m)^grading in the map variable.
  double vertex_grading = 1.5;
  /// Nodes per panel (the last panels absorb any remainder).
  int panel_order = 16;
};

/// Gauss-Legendre panel on the map variable of one piece.
struct Panel {
  std::size_t piece;
  std::size_t first;  // index of the first node
  int count;
  double u_lo, u_hi;
  double center() const { return 0.5 * (u_lo + u_hi); }
  double half() const { return 0.5 * (u_hi - u_lo); }
};

/// Quadrature nodes on a contour. Each piece is parametrized by u in [-1, 1]:
/// segments affinely, rays by the Mobius map u -> a(1+u)/(b-u), which reaches
/// the truncation radius R at u = 1 (b = 1 and a = ray_scale when R = inf).
class CollocationGrid {
 public:
  CollocationGrid(Contour contour, int n, double R, GridOptions opt = {});

  const Contour& contour() const { return contour_; }
  int points_per_piece() const { return n_; }
  double truncation_radius() const { return R_; }
  const GridOptions& options() const { return opt_; }

  std::size_t size() const { return nodes_.size(); }
  cplx node(std::size_t j) const { return nodes_[j]; }
  double weight(std::size_t j) const { return weights_[j]; }
  /// Complex line element dz at node j along the geometric direction.
  cplx dz(std::size_t j) const { return dz_[j]; }
  double param(std::size_t j) const { return u_[j]; }
  std::size_t piece_of(std::size_t j) const { return piece_[j]; }
  int orientation_of(std::size_t j) const { return contour_.pieces[piece_[j]].orientation; }
  std::size_t piece_begin(std::size_t k) const { return begin_[k]; }
  std::size_t piece_end(std::size_t k) const { return begin_[k + 1]; }
  const std::vector<Panel>& panels() const { return panels_; }
  const std::vector<cplx>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  cplx map(std::size_t piece, double u) const;
  cplx map_prime(std::size_t piece, double u) const;
  /// Preimage of z in the map variable of a piece (may be complex or infinite).
  cplx preimage(std::size_t piece, cplx z) const;
  /// Pole of the ray map (b); +inf for segments.
  double map_pole(std::size_t piece) const { return b_[piece]; }
  bool infinite_ray(std::size_t piece) const;
  /// Distance between z and the nearest node together with that node's local spacing.
  double local_spacing_near(cplx z) const;

 private:
  Contour contour_;
  int n_;
  double R_;
  GridOptions opt_;
  std::vector<double> a_, b_;
  std::vector<cplx> nodes_, dz_;
  std::vector<double> u_, weights_;
  std::vector<std::size_t> piece_, begin_;
  std::vector<Panel> panels_;
};

using GridPtr = std::shared_ptr<const CollocationGrid>;

GridPtr discretize(const Contour& contour, int n, double R, GridOptions opt = {});

/// Matrix-valued samples on a grid (k = 2).
struct GridFunction {
  GridPtr grid;
  std::vector<Mat2> values;

  GridFunction() = default;
  explicit GridFunction(GridPtr g) : grid(std::move(g)), values(grid->size(), Mat2::Zero()) {}
  GridFunction(GridPtr g, std::vector<Mat2> v);

  static GridFunction sample(GridPtr g, const std::function<Mat2(cplx)>& f);
  static GridFunction sample_scalar(GridPtr g, const std::function<cplx(cplx)>& f);
  static GridFunction constant(GridPtr g, const Mat2& m);

  std::size_t size() const { return values.size(); }
  Mat2& operator[](std::size_t j) { return values[j]; }
  const Mat2& operator[](std::size_t j) const { return values[j]; }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx s);
  /// Pointwise products.
  GridFunction times(const GridFunction& o) const;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx s, GridFunction a);

/// (sum w_j |f_j|^p)^(1/p) with the Frobenius norm; max |f_j| for p = inf.
double lp_norm(const GridFunction& f, double p);

/// Quadrature of a scalar function against the arclength weights.
cplx integrate(const CollocationGrid& g, const std::function<cplx(cplx)>& f);

/// L1 mass of |f| on the part of every ray beyond radius R (zero if R = inf).
double ray_tail_l1(const Contour& c, double R, const std::function<double(cplx)>& absf);

/// CSV dump: piece, re_node, im_node, weight, re_v11, im_v11, ..., im_v22.
void write_csv(std::ostream& os, const GridFunction& f);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace rhp
