#include <doctest.h>

#include <random>
#include <sstream>

#include "rhp/bounds.hpp"
#include "support.hpp"

using namespace rhp;

namespace {

// l^p norm of the weighted inverse applied to one vector; a lower bound for
// the operator norm.
double probe_ratio(const Resolvent& res, const CollocationGrid& g, double p, const VecX& x) {
  const Eigen::Index n = Eigen::Index(g.size());
  Eigen::VectorXd w(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) w[j] = w[j + n] = g.weight(std::size_t(j));
  auto norm = [&](const VecX& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::abs(v[i]), p);
    return std::pow(s, 1.0 / p);
  };
  return norm(res.solve(x)) / norm(x);
}

}  // namespace

TEST_CASE("resolvent norm estimates") {
  GridPtr g = discretize(build_real_line(), 60, kInf);
  CauchyPair c(g);
  SUBCASE("identity jump has norm 1 for every p") {
    for (double p : {1.0, 2.0, 3.0, 4.0, kInf}) {
      NormEstimate e = resolvent_norm(c, JumpMatrix::identity(), p);
      CHECK(e.hi == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(e.lo <= e.hi);
    }
  }
  JumpMatrix v = nls_jump(Reflection::model(0.5), 0.0, 0.0);
  Resolvent res(assemble_Cv(c, v));
  SUBCASE("p = 2 respects the contraction bound") {
    NormEstimate e = resolvent_norm(res, *g, 2.0);
    CHECK(e.certified);
    CHECK(e.method == NormMethod::svd);
    CHECK(e.value <= 4.0 / (1.0 - 0.5));
    CHECK(e.value >= 1.0);
  }
  SUBCASE("Lanczos agrees with the dense SVD") {
    NormOptions o;
    o.dense_svd_limit = 10;
    NormEstimate a = resolvent_norm(res, *g, 2.0), b = resolvent_norm(res, *g, 2.0, o);
    CHECK(b.method == NormMethod::lanczos);
    CHECK(std::abs(a.value - b.value) < 1e-8 * a.value);
  }
  SUBCASE("interval contains every random probe") {
    std::mt19937_64 rng(3);
    for (double p : {1.5, 3.0, 4.0}) {
      NormEstimate e = resolvent_norm(res, *g, p);
      CHECK(e.method == NormMethod::interpolated);
      CHECK(e.lo <= e.hi);
      CHECK(e.value == e.hi);
      for (int k = 0; k < 10; ++k) {
        VecX x(res.size());
        std::normal_distribution<double> nd;
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = cplx(nd(rng), nd(rng));
        CHECK(probe_ratio(res, *g, p, x) <= e.hi * (1.0 + 1e-10));
      }
    }
  }
  SUBCASE("p < 1 and mismatched grids are rejected") {
    CHECK_THROWS_AS(resolvent_norm(res, *g, 0.5), DomainError);
    GridPtr other = discretize(build_real_line(), 40, kInf);
    CHECK_THROWS_AS(resolvent_norm(res, *other, 2.0), DomainError);
  }
}

TEST_CASE("theoretical bound") {
  auto [a, b] = bound_exponents(4.0, 0.01);
  CHECK(a == 7.5);
  CHECK(b == doctest::Approx(34.01));
  CHECK(theoretical_bound(1.0, 0.5, 2.0, 0.01, 3.0) == 6.0);
  CHECK(theoretical_bound(1.0, 0.5, 4.0, 0.01) == doctest::Approx(std::pow(2.0, 7.5) * std::pow(2.0, 34.01)));
  CHECK(theoretical_bound(0.0, 0.0, 4.0, 0.01, 2.0) == 2.0);
  CHECK_THROWS_AS(theoretical_bound(1.0, 0.5, 1.5, 0.01), DomainError);
  CHECK_THROWS_AS(theoretical_bound(1.0, 1.0, 4.0, 0.01), DomainError);
  CHECK_THROWS_AS(theoretical_bound(-1.0, 0.5, 4.0, 0.01), DomainError);
  // Monotone in lambda and rho.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 30; ++k) {
    const double l = 3.0 * u(rng), r = 0.9 * u(rng), p = 2.0 + 6.0 * u(rng);
    CHECK(theoretical_bound(l + 0.1, r, p, 0.01) > theoretical_bound(l, r, p, 0.01));
    CHECK(theoretical_bound(l, r + 0.05, p, 0.01) > theoretical_bound(l, r, p, 0.01));
  }
  BoundReport rep = bound_report(NormEstimate{2.0, 3.0, 3.0, 3.0}, 1.0, 0.5, 0.01, 3.0);
  CHECK(rep.ratio == 0.5);
}

TEST_CASE("conjugation constant") {
  ConjugationInputs in;
  CHECK(conjugation_constant(in) == 1.0);
  in.resolvent_2 = 2.0;
  in.mnorm_v = 2.0;
  in.l2_v_minus_I = 1.0;
  CHECK(conjugation_constant(in) == 4.0 * 8.0 * 4.0);
  in.dist = 0.25;
  CHECK(conjugation_constant(in) == doctest::Approx(128.0 / std::pow(0.25, 1.75)));
  in.dist = 0.0;
  CHECK_THROWS_AS(conjugation_constant(in), DomainError);
}

TEST_CASE("interpolation between p = 2 and k p") {
  CHECK(riesz_thorin_interpolate(3.0, 5.0, 2.0, 2.0) == 3.0);
  // p = 4, k = 2: xi = (1/2)/(3/4) = 2/3.
  CHECK(riesz_thorin_interpolate(8.0, 1.0, 4.0, 2.0) == doctest::Approx(2.0));
  auto [a, b] = interpolated_exponents(4.0, 2.0, 0.01);
  CHECK(a == doctest::Approx(7.5 * 2.0 / 3.0));
  CHECK(b == doctest::Approx(34.01 * 2.0 / 3.0 + 1.0 / 3.0));
  CHECK_THROWS_AS(riesz_thorin_interpolate(1.0, 1.0, 4.0, 1.0), DomainError);
  CHECK_THROWS_AS(interpolated_exponents(2.0, 2.0, 0.01), DomainError);
}

TEST_CASE("direct grid resolves the phase") {
  SUBCASE("x = t = 0 uses the full line") {
    GridPtr g = direct_line_grid(0.0, 0.0);
    CHECK(g->contour().size() == 2);
    CHECK(max_phase_step(*g, 0.0, 0.0) == 0.0);
  }
  SUBCASE("segments are added until the step is small") {
    DirectGridOptions o;
    o.n = 40;
    o.L = 4.0;
    GridPtr g = direct_line_grid(0.0, 1.0, o);
    CHECK(max_phase_step(*g, 0.0, 1.0) < o.max_phase_step);
    CHECK(g->contour().size() >= 4);
  }
  SUBCASE("the piece cap leaves large t unresolved") {
    DirectGridOptions o;
    o.n = 20;
    GridPtr g = direct_line_grid(0.0, 100.0, o);
    CHECK(g->contour().size() == std::size_t(2 * o.max_pieces_per_side));
    CHECK(max_phase_step(*g, 0.0, 100.0) >= o.max_phase_step);
  }
}

TEST_CASE("sweep points") {
  Reflection r = Reflection::model(0.4);
  SweepOptions o;
  o.direct.n = 40;
  o.deform.n = 40;
  SUBCASE("t = 0 goes direct") {
    SweepPoint s = sweep_point(r, 2.0, 0.0, 0.0, o);
    CHECK(s.error.empty());
    CHECK(s.route == Route::direct);
    CHECK(s.trusted);
    CHECK(s.residual < 1e-6);
  }
  SUBCASE("large t goes through the deformation") {
    SweepPoint s = sweep_point(r, 2.0, 0.0, 50.0, o);
    CHECK(s.error.empty());
    CHECK(s.route == Route::deformed);
  }
  SUBCASE("negative t and x != 0 are reduced first") {
    SweepPoint a = sweep_point(r, 2.0, 0.0, 50.0, o);
    SweepPoint b = sweep_point(r, 2.0, 3.0, 50.0, o);
    SweepPoint c = sweep_point(r, 2.0, 0.0, -50.0, o);  // model r with real r0 is even under s -> -s, conj
    CHECK(b.error.empty());
    CHECK(c.error.empty());
    CHECK(b.route == Route::deformed);
    CHECK(c.route == Route::deformed);
    CHECK(std::abs(a.estimate.value - c.estimate.value) < 1e-6 * a.estimate.value);
  }
  SUBCASE("forcing the deformed route at t = 0 falls back to direct") {
    o.force = true;
    o.forced = Route::deformed;
    CHECK(sweep_point(r, 2.0, 0.0, 0.0, o).route == Route::direct);
  }
  SUBCASE("failures are recorded, not thrown") {
    SweepPoint s = sweep_point(r, 1.5, 0.0, 1.0, o);
    CHECK_FALSE(s.error.empty());
  }
}

TEST_CASE("deformed operator drops the real pieces") {
  DeformOptions o;
  o.n = 30;
  DeformedOperator d = deformed_operator(Reflection::model(0.4), 2.0, o);
  for (const auto& p : d.grid->contour().pieces) CHECK(std::abs(p.axis().imag()) > 1e-12);
  CHECK(d.grid->contour().size() == 4);
  CHECK_THROWS_AS(deformed_operator(Reflection::model(0.4), 0.0, o), DomainError);
}

TEST_CASE("sweep CSV") {
  SweepPoint a;
  a.x = 0.0;
  a.t = 1.0;
  a.p = 4.0;
  a.estimate.lo = 1.0;
  a.estimate.hi = 2.0;
  a.theoretical = 10.0;
  SweepPoint b = a;
  b.error = "boom";
  std::ostringstream os;
  write_sweep_csv(os, {a, b});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,t,p,estimate_lo,estimate_hi,theoretical,route,residual,condition");
  std::getline(is, line);
  CHECK(line.rfind("0,1,4,1,2,10,direct", 0) == 0);
  std::getline(is, line);
  CHECK(line.find("nan") != std::string::npos);
}
