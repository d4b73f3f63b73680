#include "hyperksh/gaussian_states.hpp"

#include <algorithm>
#include <cmath>

namespace hyperksh {

namespace {

const double kSqrtPi = std::sqrt(kPi);

Vec2c coefficients(const HalfFormFrame& f) { return Vec2c(f.coordinate.a, f.coordinate.b); }

Mat2c symmetrized(const Mat2c& M) { return 0.5 * (M + M.transpose()); }

}  // namespace

// ---------------------------------------------------------------------------
// HalfFormFrame

bool HalfFormFrame::is_real() const {
  const double scale = std::norm(coordinate.a) + std::norm(coordinate.b);
  return std::abs(density()) <= kClassEps * std::max(scale, 1.0);
}

bool HalfFormFrame::same_as(const HalfFormFrame& other, double tol) const {
  return (coefficients(*this) - coefficients(other)).norm() <=
         tol * std::max(1.0, coefficients(other).norm());
}

cplx HalfFormFrame::jacobian_to(const HalfFormFrame& other) const {
  const Vec2c mine = coefficients(*this);
  const Vec2c theirs = coefficients(other);
  const cplx cross = mine(0) * theirs(1) - mine(1) * theirs(0);
  if (std::abs(cross) > 1e-12 * std::max(1.0, mine.norm() * theirs.norm()) ||
      theirs.norm() == 0.0) {
    throw FrameMismatchError("half-form frames belong to different polarizations");
  }
  const int k = std::abs(theirs(0)) >= std::abs(theirs(1)) ? 0 : 1;
  return mine(k) / theirs(k);
}

// ---------------------------------------------------------------------------
// LineGaussian

cplx LineGaussian::operator()(double x) const {
  const cplx u = x - center_q;
  return prefactor * std::exp(-kI * center_p * u - 0.5 * width * u * u);
}

LineExponent LineGaussian::exponent() const {
  const cplx b = width, P = center_p, Q = center_q;
  return {std::log(prefactor) + kI * P * Q - 0.5 * b * Q * Q, b * Q - kI * P, -0.5 * b};
}

LineGaussian LineGaussian::from_exponent(const LineExponent& e, const HalfFormFrame& frame,
                                         cplx q_ref) {
  LineGaussian psi;
  psi.width = -2.0 * e.k2;
  psi.center_q = q_ref;
  psi.center_p = kI * (e.k1 - psi.width * q_ref);
  psi.prefactor = std::exp(e.k0 - kI * psi.center_p * q_ref + 0.5 * psi.width * q_ref * q_ref);
  psi.frame = frame;
  return psi;
}

LineGaussian coherent_state(double P, double Q) {
  return {cplx(1.0 / kSqrtPi, 0.0), cplx(P, 0.0), cplx(Q, 0.0), cplx(1.0, 0.0),
          HalfFormFrame::dx()};
}

cplx GaussianSuperposition::operator()(double x) const {
  cplx sum = 0.0;
  for (const auto& [c, psi] : terms) sum += c * psi(x);
  return sum;
}

IntegralResult gaussian_integral_1d(const LineExponent& e) {
  if (!(e.k2.real() < 0.0)) return IntegralResult::diverges();
  return {std::sqrt(kPi / (-e.k2)) * std::exp(e.k0 - e.k1 * e.k1 / (4.0 * e.k2)), false};
}

cplx schrodinger_inner(const LineGaussian& psi1, const LineGaussian& psi2) {
  if (psi1.prefactor == 0.0 || psi2.prefactor == 0.0) return 0.0;
  if (!psi1.frame.same_as(psi2.frame) || !psi1.frame.is_real()) {
    throw FrameMismatchError("schrodinger_inner needs two sections in the same real frame");
  }
  const LineExponent a = psi1.exponent(), b = psi2.exponent();
  const LineExponent sum{std::conj(a.k0) + b.k0, std::conj(a.k1) + b.k1, std::conj(a.k2) + b.k2};
  const IntegralResult r = gaussian_integral_1d(sum);
  if (r.divergent) {
    throw DivergentIntegralError("schrodinger_inner: Re(conj(b1) + b2) <= 0");
  }
  // |dw| / |dx| for a real frame other than dx
  const double jac = coefficients(psi1.frame).norm();
  return kSqrtPi * r.value / jac;
}

cplx schrodinger_inner(const GaussianSuperposition& a, const GaussianSuperposition& b) {
  cplx sum = 0.0;
  for (const auto& [ca, pa] : a.terms) {
    for (const auto& [cb, pb] : b.terms) sum += std::conj(ca) * cb * schrodinger_inner(pa, pb);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// PhaseSpaceGaussian

cplx PhaseExponent::operator()(double x, double p) const {
  const Vec2c z(x, p);
  return c0 + (g.transpose() * z)(0) + 0.5 * (z.transpose() * Q * z)(0);
}

Vec2c PhaseExponent::gradient(double x, double p) const {
  return g + Q * Vec2c(x, p);
}

cplx PhaseSpaceGaussian::operator()(double x, double p) const {
  if (is_zero()) return 0.0;
  const Vec2c v(x - center.Q, p - center.P);
  const cplx quad = (v.transpose() * quad_form * v)(0);
  const cplx lin = (linear_phase.transpose() * v)(0);
  return prefactor * std::exp(-0.5 * quad - kI * lin);
}

PhaseExponent PhaseSpaceGaussian::exponent() const {
  if (is_zero()) throw std::logic_error("exponent of the zero section");
  const Vec2c z0(center.Q, center.P);
  const Mat2c M = symmetrized(quad_form);
  PhaseExponent e;
  e.Q = -M;
  e.g = M * z0 - kI * linear_phase;
  e.c0 = std::log(prefactor) - 0.5 * (z0.transpose() * M * z0)(0) +
         kI * (linear_phase.transpose() * z0)(0);
  return e;
}

PhaseSpaceGaussian PhaseSpaceGaussian::from_exponent(const PhaseExponent& e, Center center,
                                                     const HalfFormFrame& frame) {
  const Vec2c z0(center.Q, center.P);
  PhaseSpaceGaussian F;
  F.center = center;
  F.quad_form = -symmetrized(e.Q);
  F.linear_phase = kI * (e.g + e.Q * z0);
  F.prefactor = std::exp(e.c0 + (e.g.transpose() * z0)(0) + 0.5 * (z0.transpose() * e.Q * z0)(0));
  F.frame = frame;
  return F;
}

PhaseSpaceGaussian embed(const LineGaussian& psi, Center reference) {
  if (!psi.frame.same_as(HalfFormFrame::dx())) {
    throw FrameMismatchError("embed expects a section in the sqrt(dx) frame");
  }
  if (psi.prefactor == 0.0) return PhaseSpaceGaussian::zero(HalfFormFrame::dx());
  const LineExponent k = psi.exponent();
  PhaseExponent e;
  e.c0 = k.k0;
  e.g = Vec2c(k.k1, 0.0);
  e.Q(0, 0) = 2.0 * k.k2;
  return PhaseSpaceGaussian::from_exponent(e, reference, HalfFormFrame::dx());
}

PhaseSpaceGaussian halfform_convert(const PhaseSpaceGaussian& F, const HalfFormFrame& target) {
  PhaseSpaceGaussian out = F;
  out.prefactor *= std::sqrt(F.frame.jacobian_to(target));
  out.frame = target;
  return out;
}

LineGaussian halfform_convert(const LineGaussian& psi, const HalfFormFrame& target) {
  LineGaussian out = psi;
  out.prefactor *= std::sqrt(psi.frame.jacobian_to(target));
  out.frame = target;
  return out;
}

IntegralResult gaussian_integral_2d(const Mat2c& K_in, const Vec2c& J, cplx c) {
  const Mat2c K = symmetrized(K_in);
  const Mat2d R = K.real();
  Eigen::SelfAdjointEigenSolver<Mat2d> es_r(R);
  if (!(es_r.eigenvalues().minCoeff() > 0.0)) return IntegralResult::diverges();
  // det K = det R * prod(1 + i mu) with mu the eigenvalues of R^{-1/2} Im K R^{-1/2};
  // each factor lies in the right half plane, fixing the branch of sqrt(det K).
  const Mat2d r_inv_half = es_r.eigenvectors() *
                           es_r.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                           es_r.eigenvectors().transpose();
  const Mat2d B = r_inv_half * K.imag() * r_inv_half;
  Eigen::SelfAdjointEigenSolver<Mat2d> es_b(0.5 * (B + B.transpose()));
  cplx sqrt_det = std::sqrt(es_r.eigenvalues().prod());
  for (int j = 0; j < 2; ++j) sqrt_det *= std::sqrt(cplx(1.0, es_b.eigenvalues()(j)));
  const Vec2c KinvJ = K.inverse() * J;
  const cplx exponent = 0.5 * (J.transpose() * KinvJ)(0) + c;
  return {2.0 * kPi / sqrt_det * std::exp(exponent), false};
}

Vec2d real_transversal(const HalfFormFrame& frame) {
  const cplx a = frame.coordinate.a, b = frame.coordinate.b;
  const cplx phase = std::abs(a) >= std::abs(b) ? a / std::abs(a) : b / std::abs(b);
  const Vec2d n((a / phase).real(), (b / phase).real());
  return n / n.squaredNorm();
}

namespace {

// conj(F1) F2 as one exponent.
PhaseExponent product_exponent(const PhaseSpaceGaussian& F1, const PhaseSpaceGaussian& F2) {
  const PhaseExponent e1 = F1.exponent(), e2 = F2.exponent();
  return {std::conj(e1.c0) + e2.c0, e1.g.conjugate() + e2.g, e1.Q.conjugate() + e2.Q};
}

}  // namespace

IntegralResult polarized_inner(const PhaseSpaceGaussian& F1, const PhaseSpaceGaussian& F2,
                               double density) {
  if (!F1.frame.same_as(F2.frame)) {
    throw FrameMismatchError("polarized_inner: sections live in different frames");
  }
  if (F1.is_zero() || F2.is_zero()) return {};
  const PhaseExponent e = product_exponent(F1, F2);
  if (std::abs(density) <= kClassEps) {
    const Vec2d u = real_transversal(F1.frame);
    const Vec2c uc = u.cast<cplx>();
    const LineExponent line{e.c0, (e.g.transpose() * uc)(0), 0.5 * (uc.transpose() * e.Q * uc)(0)};
    IntegralResult r = gaussian_integral_1d(line);
    if (!r.divergent) r.value *= kSqrtPi;
    return r;
  }
  if (density < 0.0) return IntegralResult::diverges();
  IntegralResult r = gaussian_integral_2d(-e.Q, e.g, e.c0);
  if (!r.divergent) r.value *= std::sqrt(density);
  return r;
}

IntegralResult polarized_inner(const PhaseSpaceGaussian& F1, const PhaseSpaceGaussian& F2) {
  return polarized_inner(F1, F2, F1.frame.is_real() ? 0.0 : F1.frame.density());
}

LineGaussian heisenberg_shift(HeisenbergKind kind, double amount, const LineGaussian& psi) {
  LineGaussian out = psi;
  if (kind == HeisenbergKind::W) {
    out.center_q += amount;
  } else {
    // e^{-i P0 x} = e^{-i P0 Q} e^{-i P0 (x - Q)}
    out.prefactor *= std::exp(-kI * amount * psi.center_q);
    out.center_p += amount;
  }
  return out;
}

PhaseSpaceGaussian heisenberg_shift(HeisenbergKind kind, double amount,
                                    const PhaseSpaceGaussian& F) {
  PhaseSpaceGaussian out = F;
  if (F.is_zero()) return out;
  if (kind == HeisenbergKind::W) {
    out.center.Q += amount;
  } else {
    out.center.P += amount;
    out.linear_phase(0) += amount;
    out.prefactor *= std::exp(-kI * amount * F.center.Q);
  }
  return out;
}

double polarization_residual(const PhaseSpaceGaussian& F, const HolomorphicCoordinate& coord,
                             std::span<const PhasePoint> samples) {
  if (F.is_zero()) return 0.0;
  const PhaseExponent e = F.exponent();
  double worst = 0.0;
  for (const auto& z : samples) {
    const Vec2c grad = e.gradient(z.x, z.p);
    const cplx r = coord.b * grad(0) - coord.a * grad(1) + kI * z.p * coord.b;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace hyperksh
