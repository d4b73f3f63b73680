// Quadratic Hamiltonians on the plane, their complex-time linear flows,
// the induced polarizations and the canonical reduction to diagonal form.
//
// Phase-space columns are ordered (p, x) throughout this header.
#pragma once

#include <optional>
#include <span>
#include <string>

#include "hyperksh/core.hpp"

namespace hyperksh {

/// H = 1/2 (h11 p^2 + 2 h12 p x + h22 x^2).
struct QuadraticHamiltonian {
  double h11 = 0.0;
  double h12 = 0.0;
  double h22 = 0.0;

  double disc() const { return h11 * h22 - h12 * h12; }
  bool is_hyperbolic() const { return disc() < 0.0; }
  /// sqrt(-disc); throws NonHyperbolicError unless disc < 0.
  double alpha() const;
  double value(double x, double p) const;
  /// L_H = p dH/dp - H as a quadratic form on (p, x): 1/2 h11 p^2 - 1/2 h22 x^2.
  Mat2d lagrangian_form() const;

  /// 1/2 (p^2 - alpha^2 x^2).
  static QuadraticHamiltonian canonical(double alpha) { return {1.0, 0.0, -alpha * alpha}; }
  /// Free particle 1/2 p^2.
  static QuadraticHamiltonian free_particle() { return {1.0, 0.0, 0.0}; }

  friend bool operator==(const QuadraticHamiltonian&, const QuadraticHamiltonian&) = default;
};

/// The canonical hyperbolic complexifier 1/2 (p^2 - alpha^2 x^2), alpha > 0.
struct CanonicalHyperbolic {
  double alpha = 1.0;

  explicit CanonicalHyperbolic(double a);
  QuadraticHamiltonian hamiltonian() const { return QuadraticHamiltonian::canonical(alpha); }
  /// tan(theta) = alpha with theta in (0, pi/2).
  double theta() const;
};

/// A time given exactly as alpha t = k pi / d.
struct PiRational {
  long k = 0;
  long d = 1;

  double alpha_t() const { return static_cast<double>(k) * kPi / static_cast<double>(d); }
  double time(double alpha) const { return alpha_t() / alpha; }
  /// sin(alpha t), exact at multiples of pi/2.
  double sin_alpha_t() const;
  double cos_alpha_t() const;
};

double hyperbolic_alpha(const QuadraticHamiltonian& H);

/// A with d/dt (p, x)^T = A (p, x)^T along X_H; trace(A) = 0, A^2 = -disc I.
Mat2d hamiltonian_generator(const QuadraticHamiltonian& H);

/// Even/odd parts of exp(tau A) for A^2 = lambda2 I:
/// exp(tau A) = even I + odd A with even = cosh(lambda tau), odd = sinh(lambda tau)/lambda.
struct FlowCoefficients {
  cplx even;
  cplx odd;
};
FlowCoefficients flow_coefficients(cplx lambda2, cplx tau);

/// exp(tau A) acting on the column (p, x).
struct FlowMatrix {
  Mat2c entries = Mat2c::Identity();
  cplx time{0.0, 0.0};

  cplx det() const { return entries.determinant(); }
  Vec2c apply(const Vec2c& px) const { return entries * px; }
  /// Same map acting on the column (x, p).
  Mat2c xp_matrix() const;
};

FlowMatrix flow_matrix(const QuadraticHamiltonian& H, cplx tau);
/// tau = t, or tau = i t when imaginary_time is set.
FlowMatrix flow_matrix(const QuadraticHamiltonian& H, double t, bool imaginary_time);

/// w = a x + b p.
struct HolomorphicCoordinate {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};

  /// Im(conj(a) b) = dw ^ conj(dw) / (-2i dx ^ dp).
  double kahler_density() const { return (std::conj(a) * b).imag(); }
  cplx operator()(double x, double p) const { return a * x + b * p; }

  static HolomorphicCoordinate position() { return {1.0, 0.0}; }
  static HolomorphicCoordinate momentum() { return {0.0, 1.0}; }
};

/// x_tau = exp(i t X_H)(x), for any quadratic H.
HolomorphicCoordinate holomorphic_coordinate(const QuadraticHamiltonian& H, double t);
HolomorphicCoordinate holomorphic_coordinate(const QuadraticHamiltonian& H, const PiRational& t);

enum class PolarizationTag { Schrodinger, Kahler, AntiKahler, RealLine };

struct PolarizationClass {
  PolarizationTag tag = PolarizationTag::Schrodinger;
  /// (c_x, c_p) of the generating function c_x x + c_p p for RealLine.
  std::optional<std::pair<double, double>> direction;

  friend bool operator==(const PolarizationClass&, const PolarizationClass&) = default;
};

std::string to_string(PolarizationTag tag);

PolarizationClass classify_polarization(const QuadraticHamiltonian& H, double t);
PolarizationClass classify_polarization(const QuadraticHamiltonian& H, const PiRational& t);

/// (h11 / 2 alpha) sin(2 alpha t).
double kahler_density(const QuadraticHamiltonian& H, double t);

/// Sign of kahler_density with the kClassEps dead band: +1, -1 or 0.
int kahler_sign(const QuadraticHamiltonian& H, double t);

/// Parameters of the diagonalising generator f = beta x p + (gamma/2) x^2
/// and the reduced Hamiltonian h1 = H o Phi_1, Phi_s the flow of f.
struct ReductionData {
  double beta = 0.0;
  double gamma = 0.0;
  QuadraticHamiltonian h1;

  /// f as a QuadraticHamiltonian: (0, beta, gamma).
  QuadraticHamiltonian generator() const { return {0.0, beta, gamma}; }
  /// +1 or -1, the sign of the source h11.
  double sign() const { return h1.h11; }
};

ReductionData canonical_reduction(const QuadraticHamiltonian& H);

/// max over samples (x, p) of |H(Phi_1(x, p)) - h1(x, p)|.
double reduction_pullback_residual(const QuadraticHamiltonian& H, const ReductionData& R,
                                   std::span<const PhasePoint> samples);

/// tan(alpha t) / alpha for 0 <= t < pi / (2 alpha).
double time_reparametrization(double alpha, double t);

}  // namespace hyperksh
