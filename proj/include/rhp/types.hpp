#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rhp {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using VecX = Eigen::VectorXcd;
using MatX = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Raised when an operation's precondition on its inputs is violated.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when a discrete system is singular or too ill-conditioned to trust.
struct NumericalError : std::runtime_error {
  double condition = 0.0;
  NumericalError(const std::string& what, double cond)
      : std::runtime_error(what), condition(cond) {}
};

inline double frob(const Mat2& a) { return a.norm(); }

inline Mat2 sigma3_pow(cplx d) {
  Mat2 m;
  m << d, 0.0, 0.0, 1.0 / d;
  return m;
}

}  // namespace rhp
