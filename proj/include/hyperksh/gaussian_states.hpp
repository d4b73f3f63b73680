// Closed-form algebra of Gaussian wavepackets on the line and of polarized
// Gaussian sections on the plane.
//
// Sections are always stored in the gauge nabla 1 = i p dx. Phase-space
// vectors in this header are ordered (x, p).
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "hyperksh/core.hpp"
#include "hyperksh/quadratic_dynamics.hpp"

namespace hyperksh {

/// The half-form sqrt(dw) attached to a section, for a linear coordinate w.
struct HalfFormFrame {
  HolomorphicCoordinate coordinate = HolomorphicCoordinate::position();

  static HalfFormFrame dx() { return {HolomorphicCoordinate::position()}; }
  static HalfFormFrame dp() { return {HolomorphicCoordinate::momentum()}; }
  static HalfFormFrame of(const HolomorphicCoordinate& w) { return {w}; }

  double density() const { return coordinate.kahler_density(); }
  bool is_real() const;
  /// lambda with w_this = lambda * w_other. Throws FrameMismatchError when the
  /// coordinates are not proportional.
  cplx jacobian_to(const HalfFormFrame& other) const;
  bool same_as(const HalfFormFrame& other, double tol = 1e-12) const;
};

/// log psi = k0 + k1 x + k2 x^2.
struct LineExponent {
  cplx k0;
  cplx k1;
  cplx k2;

  cplx operator()(cplx x) const { return k0 + (k1 + k2 * x) * x; }
};

/// C exp(-i P (x - Q) - (b/2)(x - Q)^2) (x) sqrt(frame), with complex C, P, Q, b.
struct LineGaussian {
  cplx prefactor{1.0, 0.0};
  cplx center_p{0.0, 0.0};
  cplx center_q{0.0, 0.0};
  cplx width{1.0, 0.0};
  HalfFormFrame frame = HalfFormFrame::dx();

  cplx operator()(double x) const;
  bool normalizable() const { return width.real() > 0.0; }
  LineExponent exponent() const;
  /// Representation with center_q = q_ref.
  static LineGaussian from_exponent(const LineExponent& e, const HalfFormFrame& frame,
                                    cplx q_ref = 0.0);
};

/// Normalized coherent state pi^{-1/2} exp(-i P (x - Q) - (x - Q)^2 / 2) (x) sqrt(dx).
LineGaussian coherent_state(double P, double Q);
inline LineGaussian coherent_state(Center Y) { return coherent_state(Y.P, Y.Q); }

/// Finite linear combination of line Gaussians sharing one frame.
struct GaussianSuperposition {
  std::vector<std::pair<cplx, LineGaussian>> terms;

  cplx operator()(double x) const;
  bool empty() const { return terms.empty(); }
};

/// sqrt(pi) * integral conj(psi1) psi2 dx, closed form. Throws
/// DivergentIntegralError unless Re(conj(b1) + b2) > 0.
cplx schrodinger_inner(const LineGaussian& psi1, const LineGaussian& psi2);
cplx schrodinger_inner(const GaussianSuperposition& a, const GaussianSuperposition& b);

/// log F = c0 + g.z + 1/2 z^T Q z with z = (x, p).
struct PhaseExponent {
  cplx c0{0.0, 0.0};
  Vec2c g = Vec2c::Zero();
  Mat2c Q = Mat2c::Zero();

  cplx operator()(double x, double p) const;
  Vec2c gradient(double x, double p) const;
};

/// prefactor * exp(-1/2 v^T M v - i L.v) (x) sqrt(dw), v = (x - Q, p - P).
struct PhaseSpaceGaussian {
  cplx prefactor{0.0, 0.0};
  Center center;
  Mat2c quad_form = Mat2c::Zero();
  Vec2c linear_phase = Vec2c::Zero();
  HalfFormFrame frame;

  cplx operator()(double x, double p) const;
  bool is_zero() const { return prefactor == cplx(0.0, 0.0); }
  /// Re(M); the section is square integrable in a Kahler frame iff this is positive definite.
  Mat2d real_form() const { return quad_form.real(); }
  PhaseExponent exponent() const;
  static PhaseSpaceGaussian from_exponent(const PhaseExponent& e, Center center,
                                          const HalfFormFrame& frame);
  static PhaseSpaceGaussian zero(const HalfFormFrame& frame) { return {{0.0, 0.0}, {}, Mat2c::Zero(), Vec2c::Zero(), frame}; }
};

/// A Schrodinger-frame line Gaussian viewed as a p-independent section.
PhaseSpaceGaussian embed(const LineGaussian& psi, Center reference = {});

/// Re-express the section in a proportional frame: F_target = F * sqrt(lambda),
/// principal branch, where w_source = lambda * w_target.
PhaseSpaceGaussian halfform_convert(const PhaseSpaceGaussian& F, const HalfFormFrame& target);
LineGaussian halfform_convert(const LineGaussian& psi, const HalfFormFrame& target);

/// A closed-form Gaussian integral; divergence is an ordinary outcome.
struct IntegralResult {
  cplx value{0.0, 0.0};
  bool divergent = false;

  static IntegralResult diverges() { return {{0.0, 0.0}, true}; }
};

/// integral exp(-1/2 z^T K z + J.z + c) d^2z over R^2.
IntegralResult gaussian_integral_2d(const Mat2c& K, const Vec2c& J, cplx c);
/// integral exp(k2 x^2 + k1 x + k0) dx over R.
IntegralResult gaussian_integral_1d(const LineExponent& e);

/// integral conj(F1) F2 sqrt(density) dx dp. With density == 0 (real
/// polarization) the pairing is sqrt(pi) * integral conj(F1) F2 |dw| along a
/// line transversal to the leaves; negative density (anti-Kahler) diverges.
IntegralResult polarized_inner(const PhaseSpaceGaussian& F1, const PhaseSpaceGaussian& F2,
                               double density);
/// Same, with the density of the shared frame.
IntegralResult polarized_inner(const PhaseSpaceGaussian& F1, const PhaseSpaceGaussian& F2);

/// For a real frame w = e^{i phi} (a' x + b' p): the unit-|dw| transversal
/// direction u, so that (x, p) = s u has a' x + b' p = s.
Vec2d real_transversal(const HalfFormFrame& frame);

enum class HeisenbergKind { V, W };

/// W_{Q0} = exp(-Q0 d/dx); V_{P0} = exp(-P0 d/dp - i P0 x).
LineGaussian heisenberg_shift(HeisenbergKind kind, double amount, const LineGaussian& psi);
PhaseSpaceGaussian heisenberg_shift(HeisenbergKind kind, double amount,
                                    const PhaseSpaceGaussian& F);

/// max over samples of |b dF/dx - a dF/dp + i p b F| / |F| with exact derivatives.
double polarization_residual(const PhaseSpaceGaussian& F, const HolomorphicCoordinate& coord,
                             std::span<const PhasePoint> samples);

/// e^{-i p x}: gauge factor between the Schrodinger-adapted and the
/// momentum-adapted trivializations. Only used in explicit comparisons.
inline cplx momentum_gauge_factor(double x, double p) { return std::exp(-kI * p * x); }

}  // namespace hyperksh
