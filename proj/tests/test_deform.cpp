#include <doctest.h>

#include <random>

#include "rhp/bounds.hpp"
#include "support.hpp"

using namespace rhp;

namespace {

Reflection smooth_rational() {
  return Reflection::rational({cplx(0, -0.3), cplx(0.1, 0.05)}, {cplx(0, 1), cplx(1, 2)});
}

// Random point on one of the four half-axes of the cross.
cplx random_cross_point(std::mt19937_64& rng) {
  static const cplx dirs[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  std::uniform_real_distribution<double> u(-2.0, 1.0);
  return dirs[rng() % 4] * std::pow(10.0, u(rng));
}

std::vector<cplx> cross_samples() {
  std::vector<cplx> pts;
  for (double s : {1e-3, 0.01, 0.1, 0.3, 0.7, 1.5, 3.0, 8.0})
    for (cplx d : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) pts.push_back(s * d);
  return pts;
}

Mat2 breve_by_hand(const Reflection& r, double t, double z) {
  DeltaFunction d(r, 0.0);
  Mat2 v = nls_jump(r, 0.0, t)(z);
  cplx dm = z > 0 ? d(z) : d.boundary(z, -1);
  cplx dp = z > 0 ? d(z) : d.boundary(z, 1);
  return sigma3_pow(dm) * v * sigma3_pow(1.0 / dp);
}

}  // namespace

TEST_CASE("signature of Re(i theta)") {
  CHECK(signature(cplx(1, 1), 0.0, 1.0) == 1);
  CHECK(signature(cplx(-1, 1), 0.0, 1.0) == -1);
  CHECK(signature(cplx(2.5, 0), 0.3, 1.0) == 0);
  // Re(i theta) = Im z (2 t Re z - x); compare on random points.
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    cplx z = test::random_complex(rng, 4.0);
    const double x = 2.0 * std::uniform_real_distribution<double>(-1, 1)(rng), t = 1.5;
    const double v = (kI * theta(z, x, t)).real();
    if (std::abs(v) > 1e-12) CHECK(signature(z, x, t) == (v > 0 ? 1 : -1));
  }
}

TEST_CASE("delta conjugation") {
  const double t = 1.0;
  SUBCASE("zero reflection") {
    BreveJump b = conjugate_by_delta(nls_jump(Reflection::zero(), 0.0, t), DeltaFunction(Reflection::zero(), 0.0));
    for (double z : {-2.0, -0.1, 0.5, 3.0}) CHECK((b.eval(z) - Mat2::Identity()).norm() == 0.0);
  }
  Reflection r = Reflection::model(cplx(0.4, 0.2));
  BreveJump b = conjugate_by_delta(nls_jump(r, 0.0, t), DeltaFunction(r, 0.0));
  SUBCASE("matches the conjugation computed directly") {
    for (double z : {-4.0, -1.0, -0.2, 0.3, 1.0, 5.0}) CHECK((b.eval(z) - breve_by_hand(r, t, z)).norm() < 1e-12);
  }
  SUBCASE("right of z0 it is the product of the unipotent factors") {
    for (double z : {0.05, 0.3, 1.0, 5.0}) {
      Mat2 prod = b.minus_factor(z).inverse() * b.plus_factor(z);
      CHECK((prod - b.eval(z)).norm() < 1e-10);
      CHECK(b.minus_factor(z)(1, 0) == cplx(0.0));
      CHECK(b.plus_factor(z)(0, 1) == cplx(0.0));
    }
  }
  SUBCASE("left of z0 it is the form with Delta entries") {
    for (double z : {-0.05, -0.3, -1.0, -5.0}) {
      Mat2 prod = b.minus_factor(z).inverse() * b.plus_factor(z);
      CHECK((prod - b.eval(z)).norm() < 1e-10);
      CHECK(b.minus_factor(z)(0, 1) == cplx(0.0));
      CHECK(b.plus_factor(z)(1, 0) == cplx(0.0));
    }
  }
  SUBCASE("mismatched inputs are rejected") {
    CHECK_THROWS_AS(conjugate_by_delta(nls_jump(r, 1.0, 1.0), DeltaFunction(r, 0.0)), DomainError);
    CHECK_THROWS_AS(conjugate_by_delta(nls_jump(r, 0.0, 1.0), DeltaFunction(Reflection::model(0.1), 0.0)), DomainError);
  }
}

TEST_CASE("breve factorizations") {
  const double rho = 0.6, t = 2.0, beta = 0.25;
  Reflection r = Reflection::model(rho);
  BreveJump b = conjugate_by_delta(nls_jump(r, 0.0, t), DeltaFunction(r, 0.0));
  SUBCASE("reconstruction on both sides") {
    Factorization fr = breve_factorization(b, FactorSide::right), fl = breve_factorization(b, FactorSide::left);
    for (double z : {0.01, 0.4, 2.0, 9.0}) {
      CHECK((fr.reconstruct(z, 0) - b.eval(z)).norm() < 1e-10);
      CHECK((fl.reconstruct(-z, 0) - b.eval(-z)).norm() < 1e-10);
    }
    CHECK_THROWS_AS(fr.w_plus(-1.0, 0), DomainError);
    CHECK_THROWS_AS(fl.w_minus(1.0, 0), DomainError);
  }
  SUBCASE("continued factors stay bounded on the lens rays") {
    // |rbar| <= rho off the line, |delta^{-+2}| <= (1 - rho^2)^{-beta} on
    // arg z = +-beta pi, and the exponential is at most 1 there.
    Factorization fr = breve_factorization(b, FactorSide::right);
    const double bound = 1.0 / std::pow(1.0 - rho, beta);
    for (double u : {1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
      CHECK(fr.w_plus(std::polar(u, beta * kPi), 0).norm() <= bound);
      CHECK(fr.w_minus(std::polar(u, -beta * kPi), 0).norm() <= bound);
    }
  }
}

TEST_CASE("scaling") {
  Reflection r = Reflection::model(cplx(0.3, 0.3));
  BreveJump b = conjugate_by_delta(nls_jump(r, 0.0, 1.0), DeltaFunction(r, 0.0));
  SUBCASE("t = 1 is the identity") {
    BreveJump s = scale(b, 1.0);
    for (double z : {-2.0, 0.7}) CHECK((s.eval(z) - b.eval(z)).norm() == 0.0);
  }
  SUBCASE("scaled jump is the original at z / sqrt(t), so sup norms agree") {
    BreveJump s = scale(b, 4.0);
    double a = 0.0, c = 0.0;
    for (double z : {-3.0, -1.0, -0.25, 0.25, 1.0, 3.0}) {
      CHECK((s.eval(2.0 * z) - b.eval(z)).norm() < 1e-14);
      a = std::max(a, (s.eval(2.0 * z) - Mat2::Identity()).norm());
      c = std::max(c, (b.eval(z) - Mat2::Identity()).norm());
    }
    CHECK(std::abs(a - c) < 1e-14);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(scale(b, 0.0), DomainError);
    BreveJump off = b;
    off.nls.x = 1.0;
    CHECK_THROWS_AS(scale(off, 2.0), DomainError);
  }
  SUBCASE("resolvent norms on the line agree for the original and rescaled problem") {
    const double t = 2.0;
    BreveJump bt = conjugate_by_delta(nls_jump(r, 0.0, t), DeltaFunction(r, 0.0));
    BreveJump st = scale(bt, t);
    DirectGridOptions o;
    o.n = 100;
    CauchyPair ca(direct_line_grid(0.0, t, o)), cb(direct_line_grid(0.0, 1.0, o));
    const double na = resolvent_norm(ca, bt.jump(), 2.0).value;
    const double nb = resolvent_norm(cb, st.jump(), 2.0).value;
    CHECK(std::abs(na - nb) < 0.05 * nb);
  }
}

TEST_CASE("lens on the augmented cross") {
  Reflection r = Reflection::model(cplx(0.5, 0.1));
  const double t = 1.0;
  BreveJump b = scale(conjugate_by_delta(nls_jump(r, 0.0, t), DeltaFunction(r, 0.0)), t);
  LensedProblem lens = augment_and_lens(b, 0.25);
  SUBCASE("conjugated jump is I on the real axis") {
    for (std::size_t k : lens.real_pieces())
      for (double s : {0.01, 0.3, 1.0, 4.0}) {
        cplx z = lens.contour.pieces[k].at(s);
        CHECK((lens.conjugated(z, k) - Mat2::Identity()).norm() < 1e-10);
      }
  }
  SUBCASE("decay along the oblique rays") {
    for (std::size_t k = 0; k < lens.contour.size(); ++k) {
      if (std::abs(lens.contour.pieces[k].axis().imag()) < 1e-12) continue;
      double prev = kInf;
      for (double s = 1.0; s <= 6.0; s += 0.5) {
        const double e = (lens.conjugated(lens.contour.pieces[k].at(s), k) - Mat2::Identity()).norm();
        CHECK(e < prev);
        // |e^{+-i t z^2}| = exp(-t s^2 sin(2 beta pi)) on these rays.
        CHECK(e <= 2.0 * std::exp(-t * s * s * std::sin(2.0 * 0.25 * kPi)));
        prev = e;
      }
    }
  }
  SUBCASE("conjugation uses the sector factors on either side") {
    for (std::size_t k = 0; k < lens.contour.size(); ++k) {
      const auto& p = lens.contour.pieces[k];
      cplx z = p.at(0.8);
      cplx left = z + 1e-3 * kI * p.tangent(), right = z - 1e-3 * kI * p.tangent();
      const bool on_real = std::abs(p.axis().imag()) < 1e-12;
      Mat2 v = on_real ? b.eval(z.real()) : Mat2(Mat2::Identity());
      Mat2 expect = lens.phi(z, right) * v * lens.phi(z, left).inverse();
      CHECK((lens.conjugated(z, k) - expect).norm() < 1e-12);
    }
  }
  SUBCASE("beta must stay away from 0") { CHECK_THROWS_AS(augment_and_lens(b, 0.0), DomainError); }
  SUBCASE("non-analytic reflection cannot be lensed") {
    Reflection ind = Reflection::indicator(0.4, -1.0, 0.0);
    BreveJump bi = conjugate_by_delta(nls_jump(ind, 0.0, 1.0), DeltaFunction(ind, 0.0));
    CHECK_THROWS_AS(augment_and_lens(bi, 0.25), DomainError);
  }
}

TEST_CASE("model reflection") {
  Reflection r = smooth_rational();
  Reflection m = model_reflection(r);
  CHECK(std::abs(m(0.0) - r(0.0)) < 1e-15);
  double sup = 0.0;
  for (double s = -50.0; s <= 50.0; s += 0.01) sup = std::max(sup, std::abs(m(s)));
  CHECK(sup == doctest::Approx(std::abs(r(0.0))).epsilon(1e-12));
  CHECK(std::abs(m(0.0)) <= r.sup);
  Reflection z = model_reflection(Reflection::rational({cplx(1, 0), cplx(-1, 0)}, {cplx(0, 1), cplx(0, 1)}));
  for (double s : {-1.0, 0.0, 2.0}) CHECK(std::abs(z(s)) == 0.0);
}

TEST_CASE("g function") {
  Reflection r = smooth_rational();
  SUBCASE("identical reflections give g = 1") {
    GFunction g = build_g(r, r);
    for (double s : {-3.0, -0.5, 0.5}) CHECK(g(s) == 1.0);
  }
  GFunction g = build_g(r, model_reflection(r));
  const double rho = r.sup;
  SUBCASE("bounds on the negative axis, 1 elsewhere") {
    for (double s = -20.0; s < 0.0; s += 0.05) {
      CHECK(g(s) >= std::sqrt(1.0 - rho * rho) - 1e-15);
      CHECK(g(s) <= 1.0 / std::sqrt(1.0 - rho * rho) + 1e-15);
    }
    CHECK(g(2.0) == 1.0);
    CHECK(g(cplx(0.0, 1.5)) == 1.0);
  }
  SUBCASE("derivative bound") {
    const double lambda = h1_norm(r);
    CHECK(g.derivative_l2() <= lambda / std::pow(1.0 - rho, 1.5));
  }
}

TEST_CASE("G matrices") {
  Reflection r = smooth_rational();
  DeformationPlan plan(r, 1.0, 0.25, 0.05, 1.0);
  std::mt19937_64 rng(29);
  SUBCASE("extended jump factors through G at random points") {
    for (int k = 0; k < 20; ++k) {
      cplx z = random_cross_point(rng);
      CHECK((plan.v_e(z) - plan.G(z, -1) * plan.v2(z) * plan.G(z, 1)).norm() < 1e-10);
    }
  }
  SUBCASE("identity on the imaginary axis") {
    for (int j = 1; j <= 4; ++j)
      for (double s : {0.2, 3.0}) {
        CHECK((plan.G_quadrant(j, cplx(0, s)) - Mat2::Identity()).norm() == 0.0);
        CHECK((plan.G_quadrant(j, cplx(0, -s)) - Mat2::Identity()).norm() == 0.0);
      }
  }
  SUBCASE("sup bound") {
    double m = 0.0;
    for (cplx z : cross_samples())
      for (int side : {1, -1}) m = std::max(m, plan.G(z, side).norm());
    CHECK(m <= 2.0 / std::sqrt(1.0 - plan.rho()));
  }
  SUBCASE("points off the cross are rejected") { CHECK_THROWS_AS(plan.G(cplx(1, 1), 1), DomainError); }
}

TEST_CASE("mollified Cauchy approximants") {
  SUBCASE("constants are reproduced") {
    // Points on the two rays bounding quadrant j.
    const cplx corner[4] = {cplx(1, 1), cplx(-1, 1), cplx(-1, -1), cplx(1, -1)};
    for (int j = 1; j <= 4; ++j) {
      ScalarApproximant one = mollified_cauchy(j, [](cplx) { return cplx(1.0); }, 1e-3);
      const cplx c = corner[j - 1];
      for (double s : {0.01, 0.5, 2.0}) {
        CHECK(std::abs(one(s * c.real()) - 1.0) < 1e-9);
        CHECK(std::abs(one(cplx(0, s * c.imag())) - 1.0) < 1e-9);
      }
    }
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(mollified_cauchy(2, [](cplx) { return cplx(1.0); }, 0.0), DomainError);
    CHECK_THROWS_AS(mollified_cauchy(5, [](cplx) { return cplx(1.0); }, 0.1), DomainError);
  }
  Reflection r = smooth_rational();
  DeformationPlan plan(r, 1.0, 0.25, 1e-2, 1.0);
  SUBCASE("sup error of H2 is bounded by sqrt(gamma) ||g'||") {
    const double gp = plan.gfun().derivative_l2();
    for (double gamma : {1e-2, 1e-3}) {
      ScalarApproximant H2 = plan.approximant(2, true, gamma);
      double e = 0.0;
      for (double s : {-0.01, -0.1, -0.5, -1.0, -3.0}) e = std::max(e, std::abs(H2(s) - plan.g(s)));
      for (double s : {0.1, 1.0}) e = std::max(e, std::abs(H2(cplx(0, s)) - 1.0));
      CHECK(e <= std::sqrt(gamma) * gp);
    }
  }
  SUBCASE("L2 size of h2 on the boundary of the second quadrant") {
    ScalarApproximant h2 = plan.offdiag_approximant(2);
    Contour sigma2;
    sigma2.pieces = {ContourPiece::ray(0.0, -1.0), ContourPiece::ray(0.0, kI)};
    GridPtr g = discretize(sigma2, 48, kInf);
    double s = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j) s += g->weight(j) * std::norm(h2(g->node(j)));
    CHECK(std::sqrt(s) <= plan.lambda() / std::sqrt(1.0 - plan.rho()));
  }
}

TEST_CASE("H and R") {
  SUBCASE("model reflection gives H = I") {
    DeformationPlan plan(Reflection::model(0.4), 1.0, 0.25, 1e-3, 1.0);
    for (cplx z : cross_samples())
      for (int side : {1, -1}) CHECK((plan.H(z, side) - Mat2::Identity()).norm() < 1e-9);
  }
  Reflection r = smooth_rational();
  DeformationPlan plan(r, 1.0, 0.25);
  SUBCASE("H approximates G within epsilon for the selected gamma") {
    const double eps = default_epsilon(plan.rho(), plan.beta());
    double m = 0.0;
    for (cplx z : cross_samples())
      for (int side : {1, -1}) m = std::max(m, (plan.H(z, side) - plan.G(z, side)).norm());
    CHECK(m < eps);
  }
  SUBCASE("stage algebra") {
    for (cplx z : cross_samples()) {
      CHECK((plan.v_H(z) - plan.H(z, -1) * plan.v2(z) * plan.H(z, 1)).norm() < 1e-10);
      Mat2 back = plan.R(z, -1).inverse() * plan.v_H(z) * plan.R(z, 1);
      CHECK((back - plan.v2(z)).norm() < 1e-10);
    }
  }
  SUBCASE("L2 distance of H from I on the cross") {
    GridPtr g = discretize(build_cross(), 32, kInf);
    double s = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j)
      for (int side : {1, -1}) s += g->weight(j) * (plan.H(g->node(j), side) - Mat2::Identity()).squaredNorm();
    CHECK(std::sqrt(s) <= 4.0 * plan.lambda() / (1.0 - plan.rho()));
  }
}

TEST_CASE("choose_gamma") {
  CHECK(choose_gamma(1.0, 0.5, 0.25) == doctest::Approx(std::pow(std::pow(0.5, 7.25) / 2.0, 2)).epsilon(1e-14));
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double lambda = 5.0 * u(rng), rho = 0.99 * u(rng), beta = 0.01 + 0.48 * u(rng);
    const double g = choose_gamma(lambda, rho, beta);
    CHECK(g < 1.0);
    CHECK(g > 0.0);
    CHECK(choose_gamma(lambda + 0.1, rho, beta) < g);
    if (rho < 0.98) CHECK(choose_gamma(lambda, rho + 0.01, beta) < g);
  }
  CHECK_THROWS_AS(choose_gamma(-1.0, 0.5, 0.25), DomainError);
  CHECK_THROWS_AS(choose_gamma(1.0, 1.0, 0.25), DomainError);
  CHECK_THROWS_AS(choose_gamma(1.0, 0.5, 0.5), DomainError);
}

TEST_CASE("translation to the stationary point") {
  Reflection r = smooth_rational();
  SUBCASE("z0 = 0 is the identity") {
    Reduced red = translate_reduce(r, 0.0, 3.0);
    for (double s : {-1.0, 0.5}) CHECK(std::abs(red.r(s) - r(s)) == 0.0);
  }
  SUBCASE("norms are preserved") {
    Reduced red = translate_reduce(r, 1.2, 0.8);
    CHECK(red.z0 == doctest::Approx(0.75));
    CHECK(std::abs(h1_norm(red.r) - h1_norm(r)) < 1e-8);
    double a = 0.0, b = 0.0;
    for (double s = -30.0; s <= 30.0; s += 0.001) {
      a = std::max(a, std::abs(r(s)));
      b = std::max(b, std::abs(red.r(s - red.z0)));
    }
    CHECK(std::abs(a - b) < 1e-10);
  }
  SUBCASE("conjugation by the shift maps C_v to C_v of the reduced data") {
    const double x = 1.0, t = 0.5;
    Reduced red = translate_reduce(r, x, t);
    auto segments = [](double shift) {
      Contour c;
      for (int k = -3; k < 3; ++k) c.pieces.push_back(ContourPiece::segment(cplx(2.0 * k + shift), cplx(2.0 * k + 2.0 + shift)));
      return c;
    };
    GridPtr g1 = discretize(segments(red.z0), 24, kInf), g0 = discretize(segments(0.0), 24, kInf);
    MatX a = assemble_Cv(CauchyPair(g1), nls_jump(r, x, t)).matrix;
    MatX b = assemble_Cv(CauchyPair(g0), nls_jump(red.r, 0.0, t)).matrix;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("t = 0 has no stationary point") { CHECK_THROWS_AS(translate_reduce(r, 1.0, 0.0), DomainError); }
}

TEST_CASE("reflection to t >= 0") {
  Reflection r = smooth_rational();
  Reduced red = reflect_reduce(r, 0.4, -1.5);
  CHECK(red.t == 1.5);
  SUBCASE("applying it twice returns the data") {
    Reduced back = reflect_reduce(red.r, red.x, -red.t);
    for (double s : {-2.0, -0.1, 0.7, 3.0}) CHECK(std::abs(back.r(s) - r(s)) < 1e-15);
  }
  SUBCASE("Sobolev norm is preserved") { CHECK(std::abs(h1_norm(red.r) - h1_norm(r)) < 1e-8); }
  SUBCASE("solutions are related by M(z) = conj(M~(-conj z))") {
    DirectGridOptions o;
    o.n = 60;
    GridPtr g = direct_line_grid(0.4, -1.5, o);
    GridPtr gm = direct_line_grid(0.4, 1.5, o);
    RHPSolution s = solve_normalized(CauchyPair(g), nls_jump(r, 0.4, -1.5));
    RHPSolution m = solve_normalized(CauchyPair(gm), nls_jump(red.r, red.x, red.t));
    double e = 0.0;
    for (cplx z : {cplx(0.3, 0.5), cplx(-1.0, 2.0), cplx(2.0, -0.7)}) {
      Mat2 a = extend(s, z), b = extend(m, -std::conj(z));
      e = std::max(e, (a - b.conjugate()).norm());
    }
    CHECK(e < 1e-6);
  }
  CHECK_THROWS_AS(reflect_reduce(r, 0.0, 1.0), DomainError);
}

TEST_CASE("deformed model solve") {
  Reflection r = Reflection::model(0.5);
  DeformOptions o;
  o.n = 60;
  DeformedSolution d = solve_deformed(r, 1.0, o);
  CHECK(d.hat.jump_residual < 1e-6);
  CHECK_THROWS_AS(solve_deformed(r, 0.0, o), DomainError);
  CHECK_THROWS_AS(solve_deformed(Reflection::indicator(0.4, -1.0, 0.0), 1.0, o), DomainError);
  CHECK_THROWS_AS(d.minus_on_real(0.0), DomainError);
}

TEST_CASE("stage record lists every stage") {
  DeformationPlan plan(smooth_rational(), 1.0, 0.25, 0.05, 1.0);
  nlohmann::json j = plan.stage_record(2);
  std::vector<std::string> names;
  for (const auto& s : j["stages"]) names.push_back(s["name"]);
  for (const char* n : {"v_theta", "v_breve", "v1", "v_e", "v2", "v_H", "G_plus", "G_minus", "H_plus", "H_minus"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK(j["gamma"] == 0.05);
  CHECK(j["conjugators"].size() == 8);
}
