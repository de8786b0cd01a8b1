#pragma once

#include "rhp/jump.hpp"

namespace rhp {

/// Solution of the scalar problem delta+ = delta- (1 - |r|^2) on (-inf, z0),
/// delta -> 1 at infinity, evaluated by adaptive quadrature of its Cauchy
/// integral representation.
class DeltaFunction {
 public:
  DeltaFunction(Reflection r, double z0, double rho = -1.0);

  /// delta(z) for z off (-inf, z0].
  cplx operator()(cplx z) const;
  /// log delta(z) = (1/2 pi i) int log(1 - |r|^2) / (s - z) ds.
  cplx log_value(cplx z) const;
  /// delta+(x) (side = +1) or delta-(x) (side = -1); for x > z0 both equal delta(x).
  cplx boundary(double x, int side) const;
  /// Delta = delta+ delta- on (-inf, z0), from the principal-value formula.
  cplx product(double x) const;
  /// Continuation of delta+ delta- off (-inf, z0): delta^2 / (1 - r rbar) in
  /// the upper half plane, delta^2 (1 - r rbar) in the lower. Needs analytic r.
  cplx product_continued(cplx z) const;

  const Reflection& reflection() const { return r_; }
  double z0() const { return z0_; }
  double rho() const { return rho_; }
  /// Points with |x - z0| below this are rejected by the boundary evaluators.
  double exclusion = 1e-8;
  double tolerance = 1e-12;

 private:
  double f(double s) const;
  /// PV int_{-inf}^{z0} f(s)/(s - x) ds for real x < z0.
  double principal_value(double x) const;
  std::vector<double> breaks_in(double a, double b) const;

  Reflection r_;
  double z0_;
  double rho_;
};

cplx delta_off(const Reflection& r, double z0, cplx z);
cplx delta_boundary(const Reflection& r, double z0, double x, int side);
cplx capital_delta(const Reflection& r, double z0, double x);

/// max(||delta+ - 1||_2, ||delta- - 1||_2) over the real line.
double delta_l2_distance(const Reflection& r, double z0);

/// Continued delta-quantities of the model reflection r0/(1 + iz), z0 = 0,
/// at one point, with the half-plane envelopes they must respect.
struct ContinuationReport {
  cplx z;
  double rho = 0.0;
  cplx delta;
  cplx delta_sq;          // delta(z)^2
  cplx product;           // continuation of delta+ delta- (upper) or its inverse (lower)
  double product_bound = 0.0;
  double delta_sq_bound = 0.0;  // bound on |delta^-2| (upper) or |delta^2| (lower)
  double unit_check = 0.0;      // |delta| (upper) or |1/delta| (lower), must be <= 1
  bool ok = false;
};

ContinuationReport model_continuation_bounds(cplx r0, cplx z, double rho = -1.0);

/// Sobolev norm (||r||_2^2 + ||r'||_2^2)^{1/2} on the real line by quadrature.
double h1_norm(const Reflection& r);
double l2_norm(const Reflection& r);

}  // namespace rhp
