#include "hyperksh/transforms.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

namespace hyperksh {

namespace mutation {
namespace {
std::atomic<bool> g_flip_width{false};
}
void set_flip_width_sign(bool on) { g_flip_width.store(on); }
bool flip_width_sign() { return g_flip_width.load(); }
}  // namespace mutation

namespace {

const double kInvSqrtPi = 1.0 / std::sqrt(kPi);

// sinh(y)/y and (sinh(y)/y - 1)/y^2 as functions of z = y^2; both are even in y
// so the branch of sqrt(z) is irrelevant.
cplx sinhc_of_square(cplx z) {
  if (std::abs(z) < 1e-2) {
    cplx sum = 0.0, term = 1.0;
    for (int k = 0; k < 12; ++k) {
      sum += term;
      term *= z / static_cast<double>((2 * k + 2) * (2 * k + 3));
    }
    return sum;
  }
  const cplx y = std::sqrt(z);
  return std::sinh(y) / y;
}

cplx sinhc_excess_of_square(cplx z) {
  if (std::abs(z) < 1e-1) {
    cplx sum = 0.0, term = 1.0 / 6.0;
    for (int k = 1; k < 14; ++k) {
      sum += term;
      term *= z / static_cast<double>((2 * k + 2) * (2 * k + 3));
    }
    return sum;
  }
  return (sinhc_of_square(z) - 1.0) / z;
}

Mat2c swap_px(const Mat2c& M) {
  Mat2c out;
  out << M(1, 1), M(1, 0), M(0, 1), M(0, 0);
  return out;
}

void require_dx(const LineGaussian& psi, const char* where) {
  if (!psi.frame.same_as(HalfFormFrame::dx())) {
    throw FrameMismatchError(std::string(where) + " expects a section in the sqrt(dx) frame");
  }
}

double checked_sin_shift(double theta, double sin_at, double cos_at) {
  const double s = sin_at * std::cos(theta) + cos_at * std::sin(theta);
  if (std::abs(s) <= kClassEps) {
    throw SingularTimeError("sin(theta + alpha t) vanishes: the Gaussian ansatz degenerates");
  }
  return s;
}

struct Pulled {
  PhaseExponent exponent;
  HalfFormFrame frame;
  Mat2c T;  // S(s) in (x, p) order
};

Pulled pull_back(const QuadraticHamiltonian& G, cplx s, const PhaseExponent& e,
                 const HalfFormFrame& frame) {
  const Mat2c T = flow_matrix(G, s).xp_matrix();
  const Mat2c I = swap_px(lagrangian_action_form(G, s));
  Pulled out;
  out.T = T;
  out.exponent.c0 = e.c0;
  out.exponent.g = T.transpose() * e.g;
  out.exponent.Q = T.transpose() * e.Q * T + 2.0 * kI * I;
  const Vec2c c = T.transpose() * Vec2c(frame.coordinate.a, frame.coordinate.b);
  out.frame = HalfFormFrame::of({c(0), c(1)});
  return out;
}

PhaseSpaceGaussian closed_form_section(double alpha, double sin_at, double cos_at, Center Y) {
  const double theta = std::atan(alpha);
  const double S = checked_sin_shift(theta, sin_at, cos_at);
  const double st = std::sin(theta), ct = std::cos(theta);
  PhaseSpaceGaussian F;
  F.prefactor = kInvSqrtPi * std::sqrt(std::abs(st / S));
  F.center = Y;
  F.quad_form << st * cos_at, kI * ct * sin_at, kI * ct * sin_at, ct * sin_at;
  F.quad_form /= S;
  F.linear_phase = Vec2c(Y.P, 0.0);
  F.frame = HalfFormFrame::of({cplx(cos_at, 0.0), cplx(0.0, sin_at / alpha)});
  return F;
}

}  // namespace

KshClosedForm ksh_closed_form(const CanonicalHyperbolic& H, double t, Center Y) {
  const double a = H.alpha;
  KshClosedForm k;
  k.theta = H.theta();
  const double S = checked_sin_shift(k.theta, std::sin(a * t), std::cos(a * t));
  k.b_tau = a * std::cos(k.theta + a * t) / S;
  if (mutation::flip_width_sign()) k.b_tau = -k.b_tau;
  k.prefactor_abs = std::sqrt(std::abs(std::sin(k.theta) / S));
  const double s = std::sin(a * t);
  k.action_centers = cplx(std::sin(2.0 * a * t) / (4.0 * a) * (Y.P * Y.P + a * a * Y.Q * Y.Q),
                          s * s * Y.P * Y.Q);
  return k;
}

LineGaussian heat_semigroup(const CanonicalHyperbolic& H, double t, Center Y) {
  const KshClosedForm k = ksh_closed_form(H, t, Y);
  const double a = H.alpha, c = std::cos(a * t), s = std::sin(a * t);
  LineGaussian psi;
  psi.prefactor = kInvSqrtPi * k.prefactor_abs * std::exp(k.action_centers);
  psi.center_p = cplx(c * Y.P, a * s * Y.Q);
  psi.center_q = cplx(c * Y.Q, s * Y.P / a);
  psi.width = k.b_tau;
  psi.frame = HalfFormFrame::dx();
  return psi;
}

LineGaussian heat_flow(const QuadraticHamiltonian& H, cplx t, const LineGaussian& psi) {
  require_dx(psi, "heat_flow");
  if (psi.prefactor == 0.0) return psi;
  const LineExponent k = psi.exponent();
  const cplx b0 = -2.0 * k.k2, c0 = k.k1;
  const cplx tau = kI * t;
  const Mat2c S = flow_matrix(H, tau).entries;
  const cplx v = -kI * S(1, 0) * b0 + S(1, 1);
  const cplx u = S(0, 0) * b0 + kI * S(0, 1);
  if (std::abs(v) <= kClassEps) {
    std::ostringstream msg;
    msg << "heat flow degenerates at t = " << t;
    throw SingularTimeError(msg.str());
  }
  const cplx gM = -kI * flow_coefficients(cplx(-H.disc(), 0.0), tau).odd;
  LineExponent out;
  out.k2 = -0.5 * (u / v);
  out.k1 = c0 / v;
  out.k0 = k.k0 - 0.5 * std::log(v) + 0.5 * H.h11 * c0 * c0 * gM / v;
  const Vec2c centers = S * Vec2c(psi.center_p, psi.center_q);
  return LineGaussian::from_exponent(out, HalfFormFrame::dx(), centers(1));
}

GaussianSuperposition heat_flow(const QuadraticHamiltonian& H, cplx t,
                                const GaussianSuperposition& psi) {
  GaussianSuperposition out;
  out.terms.reserve(psi.terms.size());
  for (const auto& [c, g] : psi.terms) out.terms.emplace_back(c, heat_flow(H, t, g));
  return out;
}

Mat2c lagrangian_action_form(const QuadraticHamiltonian& G, cplx s) {
  const Mat2c A = hamiltonian_generator(G).cast<cplx>();
  const Mat2c K = G.lagrangian_form().cast<cplx>();
  const cplx l2s2 = -G.disc() * s * s;
  const cplx sc = sinhc_of_square(l2s2);
  const cplx i_cc = 0.5 * s * (1.0 + sinhc_of_square(4.0 * l2s2));
  const cplx i_cg = 0.5 * s * s * sc * sc;
  const cplx i_gg = 2.0 * s * s * s * sinhc_excess_of_square(4.0 * l2s2);
  const Mat2c form = i_cc * K + i_cg * (A.transpose() * K + K * A) + i_gg * (A.transpose() * K * A);
  return 0.5 * (form + form.transpose());
}

PhaseSpaceGaussian prequantum_flow(const QuadraticHamiltonian& G, cplx s,
                                   const PhaseSpaceGaussian& F) {
  const Mat2c T = flow_matrix(G, s).xp_matrix();
  if (F.is_zero()) {
    const Vec2c c = T.transpose() * Vec2c(F.frame.coordinate.a, F.frame.coordinate.b);
    return PhaseSpaceGaussian::zero(HalfFormFrame::of({c(0), c(1)}));
  }
  const Pulled p = pull_back(G, s, F.exponent(), F.frame);
  const Vec2c z = p.T.inverse() * Vec2c(F.center.Q, F.center.P);
  return PhaseSpaceGaussian::from_exponent(p.exponent, {z(1).real(), z(0).real()}, p.frame);
}

PhaseSpaceGaussian prequantum_evolution(const QuadraticHamiltonian& H, double t,
                                        const LineGaussian& psi) {
  require_dx(psi, "prequantum_evolution");
  const cplx s = kI * t;
  if (psi.prefactor == 0.0) {
    return PhaseSpaceGaussian::zero(HalfFormFrame::of(holomorphic_coordinate(H, t)));
  }
  const PhaseSpaceGaussian embedded = embed(psi);
  const Pulled p = pull_back(H, s, embedded.exponent(), embedded.frame);
  // the classical preimage of the (complex) centers of psi
  const Vec2c y = flow_matrix(H, s).entries.inverse() * Vec2c(psi.center_p, psi.center_q);
  return PhaseSpaceGaussian::from_exponent(p.exponent, {y(0).real(), y(1).real()}, p.frame);
}

PhaseSpaceGaussian ksh_factorized(const QuadraticHamiltonian& H, double t,
                                  const LineGaussian& psi) {
  return prequantum_evolution(H, t, heat_flow(H, cplx(t, 0.0), psi));
}

PhaseSpaceGaussian ksh_transform(const CanonicalHyperbolic& H, double t, Center Y) {
  return closed_form_section(H.alpha, std::sin(H.alpha * t), std::cos(H.alpha * t), Y);
}

PhaseSpaceGaussian ksh_transform(const CanonicalHyperbolic& H, const PiRational& t, Center Y) {
  return closed_form_section(H.alpha, t.sin_alpha_t(), t.cos_alpha_t(), Y);
}

LineGaussian fourier_on_gaussian(const LineGaussian& psi) {
  require_dx(psi, "fourier_on_gaussian");
  if (psi.prefactor == 0.0) {
    LineGaussian z = psi;
    z.frame = HalfFormFrame::dp();
    return z;
  }
  if (!(psi.width.real() > 0.0)) {
    throw DivergentIntegralError("fourier_on_gaussian needs Re(b) > 0");
  }
  const LineExponent k = psi.exponent();
  LineExponent out;
  out.k2 = 1.0 / (4.0 * k.k2);
  out.k1 = -kI * k.k1 / (2.0 * k.k2);
  out.k0 = k.k0 - k.k1 * k.k1 / (4.0 * k.k2) - 0.5 * std::log(-2.0 * k.k2);
  const double peak = (-out.k1 / (2.0 * out.k2)).real();
  return LineGaussian::from_exponent(out, HalfFormFrame::dp(), peak);
}

PhaseSpaceGaussian segal_bargmann(double t_tilde, Center Y) {
  if (!(t_tilde >= 0.0)) throw OutOfRangeError("segal_bargmann needs t_tilde >= 0");
  return ksh_factorized(QuadraticHamiltonian::free_particle(), t_tilde, coherent_state(Y));
}

LineGaussian dilation_phase_unitary(double beta, double gamma, double s, const LineGaussian& psi) {
  require_dx(psi, "dilation_phase_unitary");
  if (psi.prefactor == 0.0) return psi;
  const LineExponent k = psi.exponent();
  // integral of e^{2 beta sigma} / 2 over [0, s]
  const double E = beta == 0.0 ? 0.5 * s : std::expm1(2.0 * s * beta) / (4.0 * beta);
  LineExponent out;
  out.k2 = k.k2 * std::exp(2.0 * s * beta) - kI * gamma * E;
  out.k1 = k.k1 * std::exp(s * beta);
  out.k0 = k.k0 + 0.5 * s * beta;
  return LineGaussian::from_exponent(out, HalfFormFrame::dx(), psi.center_q * std::exp(-s * beta));
}

PhaseSpaceGaussian ksh_conjugated(const QuadraticHamiltonian& H, double t, Center Y) {
  const ReductionData R = canonical_reduction(H);
  const LineGaussian reduced_in = dilation_phase_unitary(R.beta, R.gamma, 1.0, coherent_state(Y));
  const PhaseSpaceGaussian reduced_out = ksh_factorized(R.h1, t, reduced_in);
  const PhaseSpaceGaussian back = prequantum_flow(R.generator(), cplx(-1.0, 0.0), reduced_out);
  return halfform_convert(back, HalfFormFrame::of(holomorphic_coordinate(H, t)));
}

}  // namespace hyperksh
