#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "rhp/jump.hpp"

namespace rhp {

enum class SolveMethod { lu, gmres };

struct SolveOptions {
  double max_condition = 1e12;
  double tolerance = 1e-6;
  /// gmres skips the O(N^3) factorization and the condition estimate.
  SolveMethod method = SolveMethod::lu;
  double gmres_tolerance = 1e-13;
};

/// LU factorization of 1 - K for a block = 2 operator K (or restarted GMRES on
/// it). Nodes whose columns of K vanish identically (v = I there) are
/// eliminated first.
class Resolvent {
 public:
  Resolvent(const DenseOperator& k, SolveOptions opt = {});
  /// (1 - K)^{-1} applied to a row-stacked vector.
  VecX solve(const VecX& f) const;
  /// (1 - K)^{-H} applied to a row-stacked vector; needs the LU method.
  VecX solve_adjoint(const VecX& g) const;
  Eigen::Index size() const { return size_; }
  /// (1 - K)^{-1} applied row by row to a matrix density.
  GridFunction solve(const GridFunction& f) const;
  /// Dense (1 - K)^{-1}; needs the LU method.
  MatX inverse() const;
  /// Reciprocal condition estimate of the LU; NaN for gmres.
  double condition() const { return condition_; }

 private:
  Eigen::Index size_ = 0;
  std::vector<Eigen::Index> active_, passive_;
  MatX passive_rows_;  // K(p, a) for passive p, active a
  Eigen::PartialPivLU<MatX> lu_;
  MatX active_matrix_;  // kept for gmres only
  SolveOptions opt_;
  double condition_ = 1.0;
};

enum class SolutionKind { normalized, inhomogeneous };

struct RHPSolution {
  SolutionKind kind = SolutionKind::normalized;
  GridFunction density;       // h = (plus) - (minus)
  GridFunction plus_values;   // phi+ or M+
  GridFunction minus_values;  // phi- or M-
  double jump_residual = 0.0;
  double condition = 1.0;
  double p = 2.0;
};

/// phi+ = phi- v, phi -> I; phi- = I + (1 - C_v)^{-1} C-(v - I).
RHPSolution solve_normalized(const CauchyPair& c, const JumpMatrix& v, double p = 2.0, SolveOptions opt = {});
/// Same, reusing a resolvent already built from assemble_Cv(c, v).
RHPSolution solve_normalized(const CauchyPair& c, const JumpMatrix& v, const Resolvent& res, double p = 2.0);

/// M+ = M- v + F; M- = (1 - C_v)^{-1} C- F, M+ = M- v + F.
RHPSolution solve_inhomogeneous(const CauchyPair& c, const JumpMatrix& v, const GridFunction& F, double p = 2.0,
                                SolveOptions opt = {});

/// (1 - C_w)^{-1} f computed through a second factorization of the same jump:
/// ((1 - C_w')^{-1} f) b with b = v'+ (v+)^{-1}.
GridFunction solve_via_alternate_factorization(const CauchyPair& c, const Factorization& w,
                                               const Factorization& w_prime, const GridFunction& f,
                                               SolveOptions opt = {});

/// b = v'+ (v+)^{-1} sampled on the grid.
GridFunction factorization_ratio(const GridPtr& g, const Factorization& w, const Factorization& w_prime);

/// Off-contour value of the solution: I + Ch(z) (normalized) or Ch(z).
/// With `guard` set, points closer than the node spacing are rejected.
Mat2 extend(const RHPSolution& sol, cplx z, bool guard = true);

/// Difference of the two sides of the real-line energy identity for the
/// solution of M+ = M- v + f(v - I).
double energy_identity_residual(const RHPSolution& sol, const JumpMatrix& v, const GridFunction& f);

/// Solution CSV (minus values) preceded by a one-line JSON header.
void write_solution(std::ostream& os, const RHPSolution& sol);
nlohmann::json solution_header(const RHPSolution& sol);

}  // namespace rhp
