#pragma once

#include <algorithm>
#include <random>

#include "rhp/jump.hpp"

namespace rhp::test {

// Smooth decaying density: entries a_k / (s - p_k), poles at distance 0.5..1.5 from the line.
inline GridFunction random_density(GridPtr g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> a(4), p(4);
  for (int k = 0; k < 4; ++k) {
    a[k] = cplx(u(rng), u(rng));
    p[k] = cplx(2.0 * u(rng), (k % 2 ? 1.0 : -1.0) * (0.5 + std::abs(u(rng))));
  }
  return GridFunction::sample(g, [=](cplx s) {
    Mat2 m;
    for (int e = 0; e < 4; ++e) m(e / 2, e % 2) = a[e] / (s - p[(e + 1) % 4]);
    return m;
  });
}

inline cplx random_complex(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(radius * std::sqrt(u(rng)), 2.0 * kPi * u(rng));
}

inline double max_entry(const GridFunction& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

inline double max_diff(const GridFunction& a, const GridFunction& b) { return max_entry(a - b); }

inline DenseOperator plus_op(const CauchyPair& c) { return {c.plus, c.grid, "C+", 1}; }
inline DenseOperator minus_op(const CauchyPair& c) { return {c.minus, c.grid, "C-", 1}; }

}  // namespace rhp::test
