#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rhp/cauchy.hpp"

namespace rhp {

/// Reflection coefficient with its analytic companion rbar(z) = conj(r(conj z)),
/// so that r(z) rbar(z) = |r(z)|^2 on the real line.
struct Reflection {
  std::function<cplx(cplx)> r;
  std::function<cplx(cplx)> rbar;
  double sup = 0.0;  // sup of |r| on the real line (or a bound for it)
  std::string name = "custom";
  /// r and rbar are analytic off the real line (continuations may be used).
  bool analytic = false;
  /// Points where r may fail to be smooth; quadratures split there.
  std::vector<double> breaks;

  cplx operator()(cplx z) const { return r(z); }
  double abs2(double z) const { return std::norm(r(cplx(z, 0.0))); }

  static Reflection zero();
  /// r0 / (1 + i z).
  static Reflection model(cplx r0);
  /// rho on [a, z0], zero elsewhere.
  static Reflection indicator(double rho, double a, double z0);
  /// Finite sum of simple poles c_k / (z - p_k), all p_k off the real line.
  static Reflection rational(std::vector<cplx> residues, std::vector<cplx> poles);
  Reflection scaled(double gamma) const;
};

using PointFn = std::function<Mat2(cplx z, std::size_t piece)>;

struct NlsData {
  Reflection r;
  double x = 0.0;
  double t = 0.0;
  cplx theta(cplx z) const { return x * z - t * z * z; }
};

struct JumpMatrix {
  PointFn eval;
  PointFn inv_eval;
  std::optional<NlsData> nls;
  std::string label = "custom";

  Mat2 operator()(cplx z, std::size_t piece = 0) const { return eval(z, piece); }
  static JumpMatrix identity();
  /// Wraps a callable; the inverse is taken pointwise.
  static JumpMatrix from(PointFn v, std::string label = "custom");
  JumpMatrix inverse() const;
  GridFunction sample(GridPtr g) const;
  GridFunction sample_inverse(GridPtr g) const;
};

/// Split v = (I - w_minus)^{-1} (I + w_plus).
struct Factorization {
  PointFn w_minus;
  PointFn w_plus;
  JumpMatrix parent;

  Mat2 v_minus(cplx z, std::size_t k) const { return Mat2::Identity() - w_minus(z, k); }
  Mat2 v_plus(cplx z, std::size_t k) const { return Mat2::Identity() + w_plus(z, k); }
  Mat2 reconstruct(cplx z, std::size_t k) const { return v_minus(z, k).inverse() * v_plus(z, k); }
};

/// Three-factor split v = lower * diag * upper with the diagonal exposed.
struct LowerDiagUpper {
  PointFn lower, diag, upper;
  JumpMatrix parent;
  /// As a two-factor split with (v-)^{-1} = lower and v+ = diag * upper.
  Factorization as_factorization() const;
};

/// Precomputed boundary matrices of one grid.
struct CauchyPair {
  GridPtr grid;
  MatX plus, minus;
  explicit CauchyPair(GridPtr g);
};

JumpMatrix nls_jump(const Reflection& r, double x, double t);
Factorization trivial_factorization(const JumpMatrix& v);
Factorization factor_upper_lower(const JumpMatrix& v);
LowerDiagUpper factor_lower_upper(const JumpMatrix& v);

/// h -> C-(h (v - I)) on row-stacked densities.
DenseOperator assemble_Cv(const CauchyPair& c, const JumpMatrix& v);
/// h -> C+(h w-) + C-(h w+).
DenseOperator assemble_Cw(const CauchyPair& c, const Factorization& w);
/// Realization of C+ inside the dual operator: `adjoint` uses -(C-)' taken
/// against the discrete pairing sum_j tr(f_j g_j^T) dz_j, `plus` the boundary
/// matrix C+ itself. The two agree only up to discretization error.
enum class DualBoundary { adjoint, plus };

/// -(C-)' for the discrete pairing.
MatX dual_plus(const CauchyPair& c);

/// h -> (C+ h)(I - v^T), the dual of C_v under the pairing int tr(f g^T).
DenseOperator dual_Cv(const CauchyPair& c, const JumpMatrix& v, DualBoundary how = DualBoundary::adjoint);

/// max over nodes of max(|v|, |v^{-1}|) with the Frobenius norm.
double mnorm(const JumpMatrix& v, const CollocationGrid& g);

/// Jump with v replaced by v^{-1} on the listed pieces.
JumpMatrix invert_on(const JumpMatrix& v, const std::vector<std::size_t>& pieces);
/// Factorization carried through an orientation reversal of the listed pieces:
/// there (w-, w+) becomes (-w+, -w-), and the parent becomes v^{-1}.
Factorization reverse_factorization(const Factorization& w, const std::vector<std::size_t>& pieces);

/// Block operator built from per-node 2x2 multipliers: out_c = sum_a A diag(m_{a c}).
MatX right_multiply_blocks(const MatX& a, const std::vector<Mat2>& m);

}  // namespace rhp
