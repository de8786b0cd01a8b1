#pragma once

#include <memory>
#include <vector>

#include <json.hpp>

#include "rhp/scalar.hpp"
#include "rhp/solver.hpp"

namespace rhp {

/// theta(z) = x z - t z^2.
cplx theta(cplx z, double x, double t);
/// Sign of Re(i theta(z)): +1, -1 or 0.
int signature(cplx z, double x, double t);

/// The delta-conjugated jump delta-^{s3} v delta+^{-s3} and its two unipotent
/// factors v = (v-)^{-1} v+. Arguments are scaled: the jump at z is that of
/// the unscaled problem at z / scale (scale = sqrt(t) after rescaling).
struct BreveJump {
  NlsData nls;
  DeltaFunction delta;
  double scale = 1.0;

  /// Jump on the real line.
  Mat2 eval(double z) const;
  /// v- and v+ on the real line (boundary values) or continued off it;
  /// continuation needs an analytic reflection.
  Mat2 minus_factor(cplx z) const;
  Mat2 plus_factor(cplx z) const;
  JumpMatrix jump() const;
};

BreveJump conjugate_by_delta(const JumpMatrix& v_theta, const DeltaFunction& delta);

enum class FactorSide { right, left };  // z > z0 or z < z0

/// Split of the conjugated jump on one side of z0: the product of unipotent
/// factors with delta^{+-2} entries on the right, and the form with 1 - |r|^2
/// denominators on the left.
Factorization breve_factorization(const BreveJump& v, FactorSide side);

BreveJump scale(const BreveJump& v, double t);

/// Lensed problem on the augmented cross. Phi = I in the middle sectors,
/// Phi = v+ in the thin sectors above the real line and v- below.
struct LensedProblem {
  Contour contour;
  BreveJump breve;
  double beta = 0.25;

  /// Phi evaluated by the formula of the sector containing `probe`, at z.
  Mat2 phi(cplx z, cplx probe) const;
  /// Phi-(z) v(z) Phi+(z)^{-1} computed from the sector factors on either side of piece k.
  Mat2 conjugated(cplx z, std::size_t piece) const;
  /// Lensed jump for solving; identical to `conjugated` except that it is set
  /// to I exactly on the real axis, where it equals I identically.
  JumpMatrix jump() const;
  std::vector<std::size_t> real_pieces() const;
};

LensedProblem augment_and_lens(const BreveJump& v_t, double beta);

/// r(0) / (1 + iz) built from r at 0.
Reflection model_reflection(const Reflection& r);

/// g = ((1 - |r#|^2) / (1 - |r|^2))^{1/2} on the negative axis, 1 elsewhere.
struct GFunction {
  Reflection r, r_sharp;
  double operator()(cplx z) const;
  /// ||g'||_2 over the negative real axis.
  double derivative_l2() const;
};

GFunction build_g(const Reflection& r, const Reflection& r_sharp);

/// Two-pole smoothed Cauchy average of b over the boundary of the quadrant
/// Omega_j, with poles offset by +-gamma along the quadrant bisector. Reproduces
/// b = 1 exactly.
struct ScalarApproximant {
  int quadrant = 2;
  double gamma = 1e-2;
  std::function<cplx(cplx)> b;
  std::vector<double> breaks;  // points on the real ray where b is not smooth
  double tolerance = 1e-11;
  cplx operator()(cplx z) const;
};

/// Piecewise Chebyshev interpolant of f on the half line side * [0, inf),
/// with panels graded geometrically toward 0 and toward the listed singular
/// points. Below `lo` from a singular point and beyond `hi` the nearest panel
/// end value is returned.
class HalfLineTable {
 public:
  HalfLineTable() = default;
  HalfLineTable(const std::function<cplx(double)>& f, int side, std::vector<double> singular = {},
                double lo = 1e-7, double hi = 1e8);
  cplx operator()(double x) const;
  std::size_t panels() const { return lo_.size(); }

 private:
  int side_ = 1;
  std::vector<double> lo_, hi_;          // panels in u = side * x, increasing, possibly with gaps
  std::vector<std::vector<cplx>> vals_;  // values at Chebyshev points per panel
};

ScalarApproximant mollified_cauchy(int quadrant, std::function<cplx(cplx)> b, double gamma,
                                   std::vector<double> breaks = {});

/// gamma from sqrt(gamma) = c (1 - rho)^{6 + 5 beta} / (1 + lambda), c = 1.
double choose_gamma(double lambda, double rho, double beta, double c = 1.0);
/// Default epsilon: min(0.5, (1 - rho)^{7/2 + 5 beta}).
double default_epsilon(double rho, double beta);

struct Reduced {
  Reflection r;
  double x = 0.0;
  double t = 0.0;
  double z0 = 0.0;
};

/// r_{z0}(z) = r(z + z0) e^{i t z0^2}, z0 = x / (2t).
Reduced translate_reduce(const Reflection& r, double x, double t);
/// r~(z) = conj(r(-z)), t -> -t.
Reduced reflect_reduce(const Reflection& r, double x, double t);

/// Stage record of the steepest-descent construction at x = 0. Functions on
/// the cross Gamma = R u iR take the point itself; quadrants are numbered
/// counterclockwise from the first.
class DeformationPlan {
 public:
  DeformationPlan(Reflection r, double t, double beta = 0.25, double gamma = -1.0, double lambda = -1.0);

  const Reflection& r() const { return r_; }
  const Reflection& r_sharp() const { return rs_; }
  double t() const { return t_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  double rho() const { return rho_; }
  double z0() const { return 0.0; }

  /// Jumps on the real line.
  Mat2 v_theta(double z) const;
  Mat2 v_breve(double z) const;
  Mat2 v_breve_sharp(double z) const;
  Mat2 v1(double z) const;
  /// Jumps on the cross (the point decides the piece).
  Mat2 v_e(cplx z) const;
  Mat2 v2(cplx z) const;
  Mat2 v_H(cplx z) const;
  /// G and H boundary values on the cross from the plus / minus side.
  Mat2 G(cplx z, int side) const;
  Mat2 H(cplx z, int side) const;
  /// R = H^{-1} on plus faces, H on minus faces.
  Mat2 R(cplx z, int side) const;
  /// Triangular G_j / H_j of quadrant j evaluated at z.
  Mat2 G_quadrant(int j, cplx z) const;
  Mat2 H_quadrant(int j, cplx z) const;
  double g(cplx z) const { return gfun_(z); }
  /// b-function of quadrant j and its approximants (diagonal, off-diagonal).
  cplx b_offdiag(int j, cplx z) const;
  const ScalarApproximant& diag_approximant(int j) const { return diag_[j - 1]; }
  const ScalarApproximant& offdiag_approximant(int j) const { return off_[j - 1]; }
  /// Approximant of quadrant j for another mollification width.
  ScalarApproximant approximant(int j, bool diagonal, double gamma) const;

  const DeltaFunction& delta() const { return delta_; }
  const DeltaFunction& delta_sharp() const { return delta_sharp_; }
  const GFunction& gfun() const { return gfun_; }
  Contour cross() const { return build_cross(); }
  ExtendedContour extended() const { return extend(build_cross(), std::min(1.0, gamma_ / 2.0)); }

  nlohmann::json stage_record(int samples = 8) const;

 private:
  // Quadrant of a point on the cross approached from the given side.
  int adjacent_quadrant(cplx z, int side) const;

  Reflection r_, rs_;
  double t_, beta_, gamma_, lambda_, rho_;
  DeltaFunction delta_, delta_sharp_;
  GFunction gfun_;
  // delta on the positive axis and Delta on the negative axis, tabulated.
  std::shared_ptr<HalfLineTable> delta_pos_, product_neg_;
  std::vector<ScalarApproximant> diag_, off_;
};

/// Model problem (x = 0, r = r0/(1+iz)) solved on the lensed, rescaled
/// augmented cross and mapped back to the real line.
struct DeformedSolution {
  LensedProblem lens;
  double t = 1.0;
  GridPtr grid;
  RHPSolution hat;
  /// m-(x) for the original jump on the real line, x != 0.
  Mat2 minus_on_real(double x) const;
};

struct DeformOptions {
  double beta = 0.25;
  int n = 200;
  double R = 8.0;
  GridOptions grid;
};

DeformedSolution solve_deformed(const Reflection& r, double t, const DeformOptions& opt = {},
                                SolveOptions sopt = {});

}  // namespace rhp
