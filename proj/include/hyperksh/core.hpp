// Shared scalar/matrix aliases, convention constants and error types.
#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hyperksh {

using cplx = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;
using Mat2d = Eigen::Matrix2d;
using Vec2d = Eigen::Vector2d;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

/// Fixed conventions of the quantization on (R^2, dx ^ dp).
///
/// hbar = 1, the connection is nabla 1 = i p dx (potential p dx), h(1,1) = 1,
/// and the Schrodinger inner product carries an extra sqrt(pi).
struct Conventions {
  static constexpr double hbar = 1.0;
  static constexpr double hermitian_norm_of_unit = 1.0;
  static constexpr double schrodinger_norm_factor = 1.7724538509055160273;  // sqrt(pi)
  static constexpr const char* symplectic_form = "dx^dp";
  static constexpr const char* connection_potential = "p dx";
};

/// Boundary tolerance on |sin(2 alpha t)| used to decide the real branches.
inline constexpr double kClassEps = 1e-12;

/// A phase-space label Y = (P, Q) of a coherent state.
struct Center {
  double P = 0.0;
  double Q = 0.0;
};

/// An evaluation point (x, p) of the plane.
struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonHyperbolicError : public Error {
 public:
  using Error::Error;
};

class ZeroH11Error : public Error {
 public:
  using Error::Error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

class SingularTimeError : public Error {
 public:
  using Error::Error;
};

class DivergentIntegralError : public Error {
 public:
  using Error::Error;
};

class FrameMismatchError : public Error {
 public:
  using Error::Error;
};

class ToleranceNotMetError : public Error {
 public:
  using Error::Error;
};

class BlowUpError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperksh
