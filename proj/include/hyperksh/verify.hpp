// Independent numerical oracles: quadrature on R and R^2, an ODE integration
// of the Gaussian parameter flow, a Taylor matrix exponential, and Gram-matrix
// isometry harnesses. Nothing here calls the closed-form integrals it checks.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hyperksh/core.hpp"
#include "hyperksh/gaussian_states.hpp"
#include "hyperksh/quadratic_dynamics.hpp"

namespace hyperksh::verify {

enum class QuadratureRule { GaussHermite, TanhSinh };

struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::GaussHermite;
  int points_per_axis = 32;
  Vec2d center = Vec2d::Zero();
  Vec2d scale = Vec2d::Ones();
  /// Columns are the integration axes; z = center + axes * diag(scale) * y.
  Mat2d axes = Mat2d::Identity();
  double rel_tol = 1e-10;
  /// Replace center/scale/axes by a fit to the integrand's Gaussian envelope.
  bool fit_to_integrand = true;
  /// Refinement gives up (ToleranceNotMetError) beyond this many points per axis.
  int max_points = 512;

  void validate() const;
};

struct QuadratureResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  int points_per_axis = 0;
};

/// Nodes y and modified weights w e^{y^2} of the n-point Gauss-Hermite rule.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> scaled_weights;
};
const HermiteRule& gauss_hermite_rule(int n);

/// integral of f(center + scale * y) over R, refining by doubling points.
QuadratureResult integrate_1d(const std::function<cplx(double)>& f, double center, double scale,
                              QuadratureRule rule, int points, double rel_tol, int max_points);
/// integral of f over R^2 with the spec's affine coordinates.
QuadratureResult integrate_2d(const std::function<cplx(double, double)>& f,
                              const QuadratureSpec& spec);

/// sqrt(pi) integral |psi|^2 dx.
double quad_norm_schrodinger(const GaussianSuperposition& psi, const QuadratureSpec& spec = {});

/// A quadrature value, or the verdict that the integral diverges.
struct NormResult {
  double value = 0.0;
  bool divergent = false;
};

/// integral |F|^2 sqrt(density) dx dp, or the 1-D real-polarization pairing
/// when density == 0. Divergent when Re(M) has an eigenvalue below -1e-10.
NormResult quad_norm_polarized(const PhaseSpaceGaussian& F, double density,
                               const QuadratureSpec& spec = {});
/// Quadrature counterpart of polarized_inner.
IntegralResult quad_inner_polarized(const PhaseSpaceGaussian& F1, const PhaseSpaceGaussian& F2,
                                    double density, const QuadratureSpec& spec = {});
/// Quadrature counterpart of schrodinger_inner.
cplx quad_inner_schrodinger(const LineGaussian& a, const LineGaussian& b,
                            const QuadratureSpec& spec = {});

enum class OdeMethod { Rk4Fixed, DormandPrinceAdaptive };

struct OdeSpec {
  OdeMethod method = OdeMethod::DormandPrinceAdaptive;
  double max_step = 1e-2;
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double blow_up = 1e6;
};

/// Integrates Q' = iP, P' = i alpha^2 Q, b' = -(alpha^2 + b^2),
/// C' = (1/2 (P^2 + alpha^2 Q^2) - b/2) C from psi_Y; throws BlowUpError
/// once |b| exceeds spec.blow_up.
LineGaussian riccati_ode_oracle(double alpha, double t_final, Center Y, const OdeSpec& spec = {});

/// max |G_sch - G_pol| over the Gram matrices of {psi_Y} and {U_t psi_Y},
/// closed-form inner products. Propagates DivergentIntegralError.
double gram_isometry_defect(std::span<const Center> Ys, double alpha, double t);
/// Same for a general hyperbolic H through the reduction route.
double gram_isometry_defect(std::span<const Center> Ys, const QuadraticHamiltonian& H, double t);

/// exp(tau A) by scaling and squaring with a 30-term Taylor core.
FlowMatrix matrix_exp_oracle(const Mat2c& A, cplx tau, int taylor_terms = 30);

}  // namespace hyperksh::verify
