#include "hyperksh/quadratic_dynamics.hpp"

#include <cmath>
#include <sstream>

namespace hyperksh {

double QuadraticHamiltonian::alpha() const { return hyperbolic_alpha(*this); }

double QuadraticHamiltonian::value(double x, double p) const {
  return 0.5 * (h11 * p * p + 2.0 * h12 * p * x + h22 * x * x);
}

Mat2d QuadraticHamiltonian::lagrangian_form() const {
  Mat2d K;
  K << 0.5 * h11, 0.0, 0.0, -0.5 * h22;
  return K;
}

CanonicalHyperbolic::CanonicalHyperbolic(double a) : alpha(a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw NonHyperbolicError("canonical hyperbolic Hamiltonian needs alpha > 0");
  }
}

double CanonicalHyperbolic::theta() const { return std::atan(alpha); }

namespace {

// Reduces k pi / d to an exact quadrant when 2k/d is an integer.
std::optional<long> exact_quadrant(const PiRational& t) {
  if (t.d <= 0) throw std::invalid_argument("PiRational denominator must be positive");
  if ((2 * t.k) % t.d != 0) return std::nullopt;
  long q = ((2 * t.k) / t.d) % 4;
  return q < 0 ? q + 4 : q;
}

}  // namespace

double PiRational::sin_alpha_t() const {
  if (auto q = exact_quadrant(*this)) {
    constexpr double table[4] = {0.0, 1.0, 0.0, -1.0};
    return table[*q];
  }
  return std::sin(alpha_t());
}

double PiRational::cos_alpha_t() const {
  if (auto q = exact_quadrant(*this)) {
    constexpr double table[4] = {1.0, 0.0, -1.0, 0.0};
    return table[*q];
  }
  return std::cos(alpha_t());
}

double hyperbolic_alpha(const QuadraticHamiltonian& H) {
  const double disc = H.disc();
  if (!std::isfinite(disc) || disc >= 0.0) {
    std::ostringstream msg;
    msg << "Hamiltonian (" << H.h11 << ", " << H.h12 << ", " << H.h22
        << ") is not hyperbolic: det Hess = " << disc;
    throw NonHyperbolicError(msg.str());
  }
  return std::sqrt(-disc);
}

Mat2d hamiltonian_generator(const QuadraticHamiltonian& H) {
  // X_H = h11 p dx - h22 x dp + h12 x dx - h12 p dp
  Mat2d A;
  A << -H.h12, -H.h22, H.h11, H.h12;
  return A;
}

FlowCoefficients flow_coefficients(cplx lambda2, cplx tau) {
  const cplx z = lambda2 * tau * tau;
  if (std::abs(z) < 1e-2) {
    // cosh and sinh(y)/y as power series in y^2.
    cplx even = 0.0, odd = 0.0, term_even = 1.0, term_odd = 1.0;
    for (int k = 0; k < 12; ++k) {
      even += term_even;
      odd += term_odd;
      term_even *= z / static_cast<double>((2 * k + 1) * (2 * k + 2));
      term_odd *= z / static_cast<double>((2 * k + 2) * (2 * k + 3));
    }
    return {even, tau * odd};
  }
  const cplx lambda = std::sqrt(lambda2);
  return {std::cosh(lambda * tau), std::sinh(lambda * tau) / lambda};
}

Mat2c FlowMatrix::xp_matrix() const {
  Mat2c T;
  T << entries(1, 1), entries(1, 0), entries(0, 1), entries(0, 0);
  return T;
}

FlowMatrix flow_matrix(const QuadraticHamiltonian& H, cplx tau) {
  const Mat2c A = hamiltonian_generator(H).cast<cplx>();
  const auto [even, odd] = flow_coefficients(cplx(-H.disc(), 0.0), tau);
  FlowMatrix S;
  S.entries = even * Mat2c::Identity() + odd * A;
  S.time = tau;
  return S;
}

FlowMatrix flow_matrix(const QuadraticHamiltonian& H, double t, bool imaginary_time) {
  return flow_matrix(H, imaginary_time ? cplx(0.0, t) : cplx(t, 0.0));
}

HolomorphicCoordinate holomorphic_coordinate(const QuadraticHamiltonian& H, double t) {
  const FlowMatrix S = flow_matrix(H, t, true);
  return {S.entries(1, 1), S.entries(1, 0)};
}

HolomorphicCoordinate holomorphic_coordinate(const QuadraticHamiltonian& H, const PiRational& t) {
  const double alpha = H.alpha();
  const double s = t.sin_alpha_t();
  const double c = t.cos_alpha_t();
  return {cplx(c, H.h12 * s / alpha), cplx(0.0, H.h11 * s / alpha)};
}

std::string to_string(PolarizationTag tag) {
  switch (tag) {
    case PolarizationTag::Schrodinger: return "Schrodinger";
    case PolarizationTag::Kahler: return "Kahler";
    case PolarizationTag::AntiKahler: return "AntiKahler";
    case PolarizationTag::RealLine: return "RealLine";
  }
  return "?";
}

namespace {

PolarizationClass real_branch(const QuadraticHamiltonian& H, bool sin_vanishes) {
  if (sin_vanishes) return {PolarizationTag::Schrodinger, std::nullopt};
  return {PolarizationTag::RealLine, std::make_pair(H.h12, H.h11)};
}

}  // namespace

PolarizationClass classify_polarization(const QuadraticHamiltonian& H, double t) {
  const double alpha = H.alpha();
  if (H.h11 == 0.0) return {PolarizationTag::Schrodinger, std::nullopt};
  const double s2 = std::sin(2.0 * alpha * t);
  if (std::abs(s2) <= kClassEps) {
    return real_branch(H, std::abs(std::sin(alpha * t)) < std::abs(std::cos(alpha * t)));
  }
  return {H.h11 * s2 > 0.0 ? PolarizationTag::Kahler : PolarizationTag::AntiKahler, std::nullopt};
}

PolarizationClass classify_polarization(const QuadraticHamiltonian& H, const PiRational& t) {
  (void)H.alpha();
  if (t.d <= 0) throw std::invalid_argument("PiRational denominator must be positive");
  if (H.h11 == 0.0) return {PolarizationTag::Schrodinger, std::nullopt};
  if ((2 * t.k) % t.d == 0) return real_branch(H, t.k % t.d == 0);
  // sign of sin(2 k pi / d) from the position of 2k modulo 2d
  long r = (2 * t.k) % (2 * t.d);
  if (r < 0) r += 2 * t.d;
  const double s2_sign = r < t.d ? 1.0 : -1.0;
  return {H.h11 * s2_sign > 0.0 ? PolarizationTag::Kahler : PolarizationTag::AntiKahler,
          std::nullopt};
}

double kahler_density(const QuadraticHamiltonian& H, double t) {
  const double alpha = H.alpha();
  return H.h11 / (2.0 * alpha) * std::sin(2.0 * alpha * t);
}

int kahler_sign(const QuadraticHamiltonian& H, double t) {
  const double alpha = H.alpha();
  const double s2 = std::sin(2.0 * alpha * t);
  if (H.h11 == 0.0 || std::abs(s2) <= kClassEps) return 0;
  return H.h11 * s2 > 0.0 ? 1 : -1;
}

ReductionData canonical_reduction(const QuadraticHamiltonian& H) {
  if (H.h11 == 0.0) throw ZeroH11Error("canonical reduction needs h11 != 0");
  const double beta = 0.5 * std::log(std::abs(H.h11));
  // beta / sinh(beta), removable singularity at 0
  const double ratio = std::abs(beta) < 1e-4
                           ? 1.0 - beta * beta / 6.0 + 7.0 * std::pow(beta, 4) / 360.0
                           : beta / std::sinh(beta);
  const double gamma = H.h12 / H.h11 * ratio * std::exp(beta);
  const double sign = H.h11 > 0.0 ? 1.0 : -1.0;
  return {beta, gamma, QuadraticHamiltonian{sign, 0.0, sign * H.disc()}};
}

double reduction_pullback_residual(const QuadraticHamiltonian& H, const ReductionData& R,
                                   std::span<const PhasePoint> samples) {
  if (samples.empty()) throw std::invalid_argument("reduction_pullback_residual: no samples");
  const Mat2d S = flow_matrix(R.generator(), 1.0, false).entries.real();
  double worst = 0.0;
  for (const auto& z : samples) {
    const Vec2d moved = S * Vec2d(z.p, z.x);
    const double r = std::abs(H.value(moved(1), moved(0)) - R.h1.value(z.x, z.p));
    worst = std::max(worst, r);
  }
  return worst;
}

double time_reparametrization(double alpha, double t) {
  if (!(alpha > 0.0)) throw OutOfRangeError("time_reparametrization needs alpha > 0");
  if (!(t >= 0.0) || !(alpha * t < kPi / 2.0)) {
    std::ostringstream msg;
    msg << "t = " << t << " outside [0, pi/(2 alpha)) for alpha = " << alpha;
    throw OutOfRangeError(msg.str());
  }
  return std::tan(alpha * t) / alpha;
}

}  // namespace hyperksh
