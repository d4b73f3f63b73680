// Operators on Gaussian states: the heat semigroup exp(-t H^), the
// prequantum factor exp(t rho(H)), their composite U_t, the Fourier endpoint,
// the Segal-Bargmann family and the quadratic conjugations used to reduce a
// general hyperbolic H to the canonical one.
//
// Two independent code paths exist for the canonical H = 1/2 (p^2 - alpha^2 x^2):
// trigonometric closed forms, and a generic engine valid for any quadratic H
// (Mobius action of the complex flow on the width).
#pragma once

#include "hyperksh/core.hpp"
#include "hyperksh/gaussian_states.hpp"
#include "hyperksh/quadratic_dynamics.hpp"

namespace hyperksh {

/// Closed-form data of U_t psi_Y for the canonical Hamiltonian.
struct KshClosedForm {
  double theta = 0.0;         // tan(theta) = alpha
  cplx b_tau{1.0, 0.0};       // alpha cot(theta + alpha t)
  double prefactor_abs = 1.0; // |sin(theta) / sin(theta + alpha t)|^{1/2}
  cplx action_centers{0.0, 0.0};
};

KshClosedForm ksh_closed_form(const CanonicalHyperbolic& H, double t, Center Y);

/// exp(-t H^) psi_Y in closed form. Throws SingularTimeError where sin(theta + alpha t) = 0.
LineGaussian heat_semigroup(const CanonicalHyperbolic& H, double t, Center Y);

/// exp(-t H^) psi for any quadratic H and complex t, H^ the Weyl quantization
/// with p^ = i d/dx. Throws SingularTimeError when the Gaussian degenerates.
LineGaussian heat_flow(const QuadraticHamiltonian& H, cplx t, const LineGaussian& psi);
GaussianSuperposition heat_flow(const QuadraticHamiltonian& H, cplx t,
                                const GaussianSuperposition& psi);

/// The (p, x) quadratic form I_s with integral_0^s L_G(S(sigma) z) dsigma = z^T I_s z,
/// S the complex flow of G and L_G = p dG/dp - G.
Mat2c lagrangian_action_form(const QuadraticHamiltonian& G, cplx s);

/// exp(-i s rho(G)) F = e^{i int_0^s L_G} F o S(s), the frame pulled back along S(s).
/// The stored center becomes Re(S(s)^{-1} Y).
PhaseSpaceGaussian prequantum_flow(const QuadraticHamiltonian& G, cplx s,
                                   const PhaseSpaceGaussian& F);

/// exp(t rho(H)) applied to a sqrt(dx) section; output frame holomorphic_coordinate(H, t).
PhaseSpaceGaussian prequantum_evolution(const QuadraticHamiltonian& H, double t,
                                        const LineGaussian& psi);

/// U_t psi = exp(t rho(H)) exp(-t H^) psi through the generic engine.
PhaseSpaceGaussian ksh_factorized(const QuadraticHamiltonian& H, double t,
                                  const LineGaussian& psi);

/// U_t psi_Y from the trigonometric closed form.
PhaseSpaceGaussian ksh_transform(const CanonicalHyperbolic& H, double t, Center Y);
/// Same at alpha t = k pi / d, with exact sines and cosines at multiples of pi/2.
PhaseSpaceGaussian ksh_transform(const CanonicalHyperbolic& H, const PiRational& t, Center Y);

/// (F psi)(p) = (2 pi)^{-1/2} integral e^{i p x} psi(x) dx, in the sqrt(dp) frame.
LineGaussian fourier_on_gaussian(const LineGaussian& psi);

/// exp(t~ rho(H_E)) exp(-t~ H_E^) psi_Y for H_E = p^2 / 2; frame w~ = x + i t~ p.
PhaseSpaceGaussian segal_bargmann(double t_tilde, Center Y);

/// exp(-i s f^) for f = beta x p + (gamma / 2) x^2 on the line.
LineGaussian dilation_phase_unitary(double beta, double gamma, double s, const LineGaussian& psi);

/// U_t psi_Y for a general hyperbolic H with h11 != 0, through the reduction
/// U^H = exp(i rho(f)) U^{H1} exp(-i f^). Output frame holomorphic_coordinate(H, t).
PhaseSpaceGaussian ksh_conjugated(const QuadraticHamiltonian& H, double t, Center Y);

namespace mutation {
/// Test hook: flips the sign of the closed-form width b_tau. Off by default.
void set_flip_width_sign(bool on);
bool flip_width_sign();
}  // namespace mutation

}  // namespace hyperksh
