#include "rhp/solver.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <unsupported/Eigen/IterativeSolvers>

namespace rhp {

Resolvent::Resolvent(const DenseOperator& k, SolveOptions opt) : size_(k.matrix.cols()), opt_(opt) {
  if (k.block != 2) throw DomainError("Resolvent expects a block operator");
  for (Eigen::Index j = 0; j < size_; ++j) {
    if (k.matrix.col(j).cwiseAbs().maxCoeff() > 0.0) active_.push_back(j);
    else passive_.push_back(j);
  }
  const Eigen::Index na = static_cast<Eigen::Index>(active_.size());
  const Eigen::Index np = static_cast<Eigen::Index>(passive_.size());
  passive_rows_.resize(np, na);
  for (Eigen::Index c = 0; c < na; ++c)
    for (Eigen::Index r = 0; r < np; ++r) passive_rows_(r, c) = k.matrix(passive_[r], active_[c]);
  MatX a(na, na);
  for (Eigen::Index c = 0; c < na; ++c)
    for (Eigen::Index r = 0; r < na; ++r) a(r, c) = -k.matrix(active_[r], active_[c]);
  a.diagonal().array() += 1.0;
  if (na > 0 && opt.method == SolveMethod::gmres) {
    active_matrix_ = std::move(a);
    condition_ = std::numeric_limits<double>::quiet_NaN();
  } else if (na > 0) {
    lu_.compute(a);
    double rc = lu_.rcond();
    condition_ = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(condition_ < opt.max_condition))
      throw NumericalError("discrete 1 - C_v is singular or ill-conditioned", condition_);
  }
}

VecX Resolvent::solve(const VecX& f) const {
  const Eigen::Index na = static_cast<Eigen::Index>(active_.size());
  VecX out = f;
  if (na == 0) return out;
  VecX fa(na);
  for (Eigen::Index r = 0; r < na; ++r) fa[r] = f[active_[r]];
  VecX ma;
  if (opt_.method == SolveMethod::gmres) {
    Eigen::GMRES<MatX, Eigen::IdentityPreconditioner> gm(active_matrix_);
    gm.setTolerance(opt_.gmres_tolerance);
    gm.set_restart(200);
    gm.setMaxIterations(2000);
    ma = gm.solve(fa);
    if (gm.info() != Eigen::Success) throw NumericalError("gmres did not converge", gm.error());
  } else {
    ma = lu_.solve(fa);
  }
  for (Eigen::Index r = 0; r < na; ++r) out[active_[r]] = ma[r];
  // Passive nodes: m_p = f_p + sum_a K(p, a) m_a.
  if (!passive_.empty()) {
    VecX mp = passive_rows_ * ma;
    for (std::size_t i = 0; i < passive_.size(); ++i) out[passive_[i]] += mp[Eigen::Index(i)];
  }
  return out;
}

VecX Resolvent::solve_adjoint(const VecX& g) const {
  if (opt_.method != SolveMethod::lu) throw DomainError("adjoint solves need the LU method");
  const Eigen::Index na = static_cast<Eigen::Index>(active_.size());
  VecX out = g;
  if (na == 0) return out;
  // (1 - K)^{-1} = [[A^{-1}, 0], [P A^{-1}, I]] in (active, passive) order.
  VecX ga(na);
  for (Eigen::Index r = 0; r < na; ++r) ga[r] = g[active_[r]];
  if (!passive_.empty()) {
    VecX gp(Eigen::Index(passive_.size()));
    for (std::size_t i = 0; i < passive_.size(); ++i) gp[Eigen::Index(i)] = g[passive_[i]];
    ga += passive_rows_.adjoint() * gp;
  }
  VecX ma = lu_.adjoint().solve(ga);
  for (Eigen::Index r = 0; r < na; ++r) out[active_[r]] = ma[r];
  return out;
}

GridFunction Resolvent::solve(const GridFunction& f) const {
  GridFunction out(f.grid);
  for (int r = 0; r < 2; ++r) row_unstack(out, r, solve(row_stack(f, r)));
  return out;
}

MatX Resolvent::inverse() const {
  if (opt_.method != SolveMethod::lu) throw DomainError("the dense inverse needs the LU method");
  const Eigen::Index na = static_cast<Eigen::Index>(active_.size());
  MatX inv = MatX::Identity(size_, size_);
  if (na == 0) return inv;
  MatX ainv = lu_.inverse();
  for (Eigen::Index c = 0; c < na; ++c)
    for (Eigen::Index r = 0; r < na; ++r) inv(active_[r], active_[c]) = ainv(r, c);
  if (!passive_.empty()) {
    MatX pr = passive_rows_ * ainv;
    for (std::size_t i = 0; i < passive_.size(); ++i)
      for (Eigen::Index c = 0; c < na; ++c) inv(passive_[i], active_[c]) = pr(Eigen::Index(i), c);
  }
  return inv;
}

namespace {

GridFunction boundary_apply(const MatX& c, const GridFunction& h) {
  return apply(DenseOperator{c, h.grid, "C", 1}, h);
}

}  // namespace

RHPSolution solve_normalized(const CauchyPair& c, const JumpMatrix& v, double p, SolveOptions opt) {
  Resolvent res(assemble_Cv(c, v), opt);
  return solve_normalized(c, v, res, p);
}

RHPSolution solve_normalized(const CauchyPair& c, const JumpMatrix& v, const Resolvent& res, double p) {
  auto g = c.grid;
  GridFunction vj = v.sample(g);
  GridFunction vmI = vj - GridFunction::constant(g, Mat2::Identity());
  // mu = (1 - C_v)^{-1} I is the minus boundary value; h = mu (v - I).
  GridFunction mu = res.solve(GridFunction::constant(g, Mat2::Identity()));
  RHPSolution s;
  s.kind = SolutionKind::normalized;
  s.density = mu.times(vmI);
  GridFunction id = GridFunction::constant(g, Mat2::Identity());
  s.plus_values = id + boundary_apply(c.plus, s.density);
  s.minus_values = id + boundary_apply(c.minus, s.density);
  GridFunction r = s.plus_values - s.minus_values.times(vj);
  s.jump_residual = lp_norm(r, p) / (1.0 + lp_norm(vmI, p));
  s.condition = res.condition();
  s.p = p;
  return s;
}

RHPSolution solve_inhomogeneous(const CauchyPair& c, const JumpMatrix& v, const GridFunction& F, double p,
                                SolveOptions opt) {
  auto g = c.grid;
  Resolvent res(assemble_Cv(c, v), opt);
  GridFunction vj = v.sample(g);
  GridFunction mminus = res.solve(boundary_apply(c.minus, F));
  RHPSolution s;
  s.kind = SolutionKind::inhomogeneous;
  s.density = mminus.times(vj - GridFunction::constant(g, Mat2::Identity())) + F;
  s.plus_values = boundary_apply(c.plus, s.density);
  s.minus_values = boundary_apply(c.minus, s.density);
  GridFunction r = s.plus_values - s.minus_values.times(vj) - F;
  s.jump_residual = lp_norm(r, p);
  s.condition = res.condition();
  s.p = p;
  return s;
}

GridFunction factorization_ratio(const GridPtr& gp, const Factorization& w, const Factorization& wp) {
  const auto& g = *gp;
  std::vector<Mat2> b(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    cplx z = g.node(j);
    std::size_t k = g.piece_of(j);
    b[j] = wp.v_plus(z, k) * w.v_plus(z, k).inverse();
  }
  return GridFunction(gp, std::move(b));
}

GridFunction solve_via_alternate_factorization(const CauchyPair& c, const Factorization& w, const Factorization& wp,
                                               const GridFunction& f, SolveOptions opt) {
  const auto& g = *c.grid;
  for (std::size_t j = 0; j < g.size(); ++j) {
    cplx z = g.node(j);
    std::size_t k = g.piece_of(j);
    Mat2 d = w.reconstruct(z, k) - wp.reconstruct(z, k);
    if (d.norm() > 1e-10 * (1.0 + w.reconstruct(z, k).norm()))
      throw DomainError("factorizations belong to different jump matrices");
  }
  Resolvent res(assemble_Cw(c, wp), opt);
  GridFunction m = res.solve(f);
  GridFunction b = factorization_ratio(c.grid, w, wp);
  GridFunction out(c.grid);
  for (std::size_t j = 0; j < g.size(); ++j) out.values[j] = m.values[j] * b.values[j];
  return out;
}

Mat2 extend(const RHPSolution& sol, cplx z, bool guard) {
  Mat2 c = guard ? cauchy_off(sol.density, z) : cauchy_eval(sol.density, z);
  if (sol.kind == SolutionKind::normalized) c += Mat2::Identity();
  return c;
}

double energy_identity_residual(const RHPSolution& sol, const JumpMatrix& v, const GridFunction& f) {
  const auto& g = *f.grid;
  Mat2 lhs = Mat2::Zero(), rhs = Mat2::Zero();
  for (std::size_t j = 0; j < g.size(); ++j) {
    Mat2 vj = v(g.node(j), g.piece_of(j));
    const Mat2& m = sol.minus_values.values[j];
    const Mat2& fj = f.values[j];
    double w = g.weight(j);
    lhs += w * m * (vj + vj.adjoint()) * m.adjoint();
    rhs += w * (m * (Mat2::Identity() - vj.adjoint()) * fj.adjoint() + fj * (Mat2::Identity() - vj) * m.adjoint());
  }
  return (lhs - rhs).norm();
}

nlohmann::json solution_header(const RHPSolution& sol) {
  return {{"kind", sol.kind == SolutionKind::normalized ? "normalized" : "inhomogeneous"},
          {"p", sol.p},
          {"residual", sol.jump_residual},
          {"condition", sol.condition}};
}

void write_solution(std::ostream& os, const RHPSolution& sol) {
  os << "# " << solution_header(sol).dump() << '\n';
  write_csv(os, sol.minus_values);
}

}  // namespace rhp
