#pragma once

#include <vector>

#include "rhp/types.hpp"

namespace rhp {

/// Gauss-Legendre rule on [-1, 1] with the data needed for singular and
/// near-singular Cauchy weights.
struct PanelRule {
  int q = 0;
  std::vector<double> x, w;
  // Finer rule and the interpolation matrix from x onto it.
  std::vector<double> xf, wf;
  Eigen::MatrixXd interp;  // xf.size() x q
  Eigen::PartialPivLU<Eigen::MatrixXd> vandermonde_t;
};

/// Nodes and weights of the q-point Gauss-Legendre rule (exactly symmetric).
void gauss_legendre(int q, std::vector<double>& x, std::vector<double>& w);

/// Cached rule for q nodes.
const PanelRule& panel_rule(int q);

/// out[j] = integral over [-1,1] of L_j(x) / (x - zeta) dx, L_j the Lagrange
/// basis on the rule's nodes. With `principal_value` set, zeta must be real in
/// (-1,1) and the principal value is returned.
void cauchy_weights(const PanelRule& r, cplx zeta, bool principal_value, cplx* out);

/// Bernstein ellipse parameter of zeta relative to [-1, 1].
double bernstein_rho(cplx zeta);

}  // namespace rhp
