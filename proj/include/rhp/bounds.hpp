#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rhp/deform.hpp"

namespace rhp {

enum class NormMethod { svd, lanczos, power_p, rowsum_inf, colsum_one, interpolated };
std::string to_string(NormMethod m);

/// Induced L^p norm of a discrete resolvent. General p is an interval
/// [lo, hi]; value = hi.
struct NormEstimate {
  double p = 2.0;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  NormMethod method = NormMethod::svd;
  int probes = 0;
  bool certified = false;
};

struct NormOptions {
  int probes = 10;
  std::uint64_t seed = 1;
  int power_iterations = 60;
  /// Dense SVD up to this many unknowns, Lanczos beyond.
  Eigen::Index dense_svd_limit = 2000;
};

/// Norm of B = W^{1/p} (1 - K)^{-1} W^{-1/p} in l^p, where W holds the
/// quadrature weights (both components of a row share a node's weight). The
/// L^p norm of a row density is (sum_j w_j (|f_1j|^p + |f_2j|^p))^{1/p}.
NormEstimate resolvent_norm(const Resolvent& res, const CollocationGrid& g, double p, const NormOptions& opt = {});
NormEstimate resolvent_norm(const CauchyPair& c, const JumpMatrix& v, double p, const NormOptions& opt = {});

/// Exponents (of 1 + lambda, of 1/(1 - rho)) in the bound for 2 < p < inf.
std::pair<double, double> bound_exponents(double p, double beta_prime);
/// c/(1 - rho) for p = 2; c (1 + lambda)^{7+2/p} / (1 - rho)^{31+12/p+beta'} for p > 2.
double theoretical_bound(double lambda, double rho, double p, double beta_prime, double c = 1.0);

/// Estimate next to its theoretical bound.
struct BoundReport {
  NormEstimate estimate;
  double theoretical = 0.0;
  double lambda = 0.0, rho = 0.0, p = 2.0, beta_prime = 0.0;
  double ratio = 0.0;  // estimate.value / theoretical
};

BoundReport bound_report(const NormEstimate& est, double lambda, double rho, double beta_prime, double c);

/// Factors of the conjugation constant c#_v.
struct ConjugationInputs {
  double p = 4.0;
  double c = 1.0;
  double R_sup = 1.0;
  double R_inv_sup = 1.0;
  double breve_resolvent_p = 1.0;
  double breve_resolvent_2 = 1.0;
  double resolvent_2 = 1.0;
  double mnorm_v = 1.0;
  double mnorm_breve = 1.0;
  double l2_v_minus_I = 0.0;
  double l2_breve_minus_I = 0.0;
  /// dist(Gamma, Gamma'); values <= 1 divide by dist^{3/2 + 1/p}.
  double dist = 1.0;
};

double conjugation_constant(const ConjugationInputs& in);

/// norm_p2^{1-xi} norm_pk^xi with xi = (1 - 2/p) / (1 - 2/(k p)).
double riesz_thorin_interpolate(double norm_p2, double norm_pk, double p, double k);
/// Exponents of the interpolated bound: ((7 + 2/p) xi, (31 + 12/p + beta') xi + 1 - xi).
std::pair<double, double> interpolated_exponents(double p, double k, double beta_prime);

/// Largest phase change |theta(s_{j+1}) - theta(s_j)| between neighbouring nodes.
double max_phase_step(const CollocationGrid& g, double x, double t);

struct DirectGridOptions {
  int n = 200;
  /// Truncation half-width for t != 0 or x != 0.
  double L = 12.0;
  double max_phase_step = kPi / 4.0;
  int max_pieces_per_side = 8;
};

/// Grid for the undeformed problem on the real line: the two rays with R = inf
/// when x = t = 0, else [-L, L] cut into enough segments per side to keep the
/// phase step below the threshold (up to the piece cap).
GridPtr direct_line_grid(double x, double t, const DirectGridOptions& opt = {});

enum class Route { direct, deformed };
std::string to_string(Route r);

struct SweepPoint {
  double x = 0.0, t = 0.0, p = 2.0;
  NormEstimate estimate;
  double theoretical = 0.0;
  Route route = Route::direct;
  bool trusted = true;  // direct grids resolve the phase
  double residual = 0.0;
  double condition = 0.0;
  std::string error;  // non-empty when the point failed
};

/// Reference-case constants, each fitted once with a safety margin.
struct Calibration {
  double c2 = 4.0;        // L^2 bound c/(1 - rho)
  double cp = 1.0;        // c_p of the (1 + lambda)^a / (1 - rho)^b form
  double c0 = 0.0;        // lower bound in ||(1 - C_v)^{-1}|| <v> >= c0
  double margin = 2.0;
  double p = 4.0;
  double beta_prime = 0.01;
  std::string reference = "model rho=0.3, x=0, t=1, n=200";
};

struct SweepOptions {
  DirectGridOptions direct;
  DeformOptions deform;
  double beta_prime = 0.01;
  NormOptions norm;
  Calibration calibration;
  /// Force one route for every point (control runs).
  bool force = false;
  Route forced = Route::direct;
};

/// Resolvent norm at one (x, t), routed through the reductions.
SweepPoint sweep_point(const Reflection& r, double p, double x, double t, const SweepOptions& opt = {});
std::vector<SweepPoint> uniformity_sweep(const Reflection& r, double p,
                                         const std::vector<std::pair<double, double>>& xt,
                                         const SweepOptions& opt = {});

/// Fit the calibration constants on the reference case.
Calibration calibrate(double p = 4.0, double beta_prime = 0.01, double margin = 2.0, int n = 200);

/// Grid and resolvent of the lensed model problem with the real pieces
/// (where the lensed jump is I) dropped.
struct DeformedOperator {
  GridPtr grid;
  JumpMatrix jump;
  double residual = 0.0;
};
DeformedOperator deformed_operator(const Reflection& r, double t, const DeformOptions& opt = {});

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& pts);

}  // namespace rhp
