#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>

namespace passat {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

inline constexpr double kSpeedOfLight = 2.99792458e8;
inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Thrown for malformed inputs and broken model assumptions; CLI exit 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Thrown when a solver or decomposition fails numerically; CLI exit 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Thrown for file/serialization problems; CLI exit 4.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// sin(pi x)/(pi x), the normalized sinc.
inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

// Reduce into [0, 2pi).
inline double mod_2pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

}  // namespace passat
