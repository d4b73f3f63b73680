#include "hyperksh/verify.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "hyperksh/transforms.hpp"

namespace hyperksh::verify {

namespace {

const double kSqrtPi = std::sqrt(kPi);
// 1/2 kappa s^2 for the Gauss-Hermite envelope; > 1 keeps f e^{y^2} decaying.
constexpr double kHermiteWiden = 1.6;
constexpr double kTanhSinhUMax = 3.2;

HermiteRule build_hermite(int n) {
  // Golub-Welsch eigenvalues as starting points, then Newton on orthonormal
  // Hermite functions in long double so that log-weights stay finite for large n.
  using ld = long double;
  const ld pim4 = 0.7511255444649424828587030047762276930510L;  // pi^{-1/4}
  HermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.scaled_weights.assign(n, 0.0);
  Eigen::VectorXd guess = Eigen::VectorXd::Zero(1);
  if (n > 1) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), off(n - 1);
    for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    guess = es.eigenvalues();  // ascending
  }
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    ld z = guess(n - 1 - i);
    ld pp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      ld p1 = pim4, p2 = 0.0L;
      for (int j = 1; j <= n; ++j) {
        const ld p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0L / j) * p2 - std::sqrt(ld(j - 1) / j) * p3;
      }
      pp = std::sqrt(2.0L * n) * p2;
      const ld dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-17L * std::max(ld(1), std::abs(z))) break;
    }
    const ld log_w = std::log(2.0L) - 2.0L * std::log(std::abs(pp)) + z * z;
    const double w = static_cast<double>(std::exp(log_w));
    rule.nodes[i] = static_cast<double>(z);
    rule.nodes[n - 1 - i] = -static_cast<double>(z);
    rule.scaled_weights[i] = w;
    rule.scaled_weights[n - 1 - i] = w;
  }
  return rule;
}

// Nodes and weights of one axis for the standard variable y.
void axis_rule(QuadratureRule rule, int n, std::vector<double>& y, std::vector<double>& w) {
  if (rule == QuadratureRule::GaussHermite) {
    const HermiteRule& r = gauss_hermite_rule(n);
    y = r.nodes;
    w = r.scaled_weights;
    return;
  }
  // sinh-sinh substitution y = sinh(pi/2 sinh u), trapezoid in u
  y.assign(n, 0.0);
  w.assign(n, 0.0);
  const double h = 2.0 * kTanhSinhUMax / (n - 1);
  for (int k = 0; k < n; ++k) {
    const double u = -kTanhSinhUMax + h * k;
    const double arg = 0.5 * kPi * std::sinh(u);
    y[k] = std::sinh(arg);
    w[k] = h * 0.5 * kPi * std::cosh(u) * std::cosh(arg);
  }
}

double envelope_scale(QuadratureRule rule, double kappa) {
  return rule == QuadratureRule::GaussHermite ? std::sqrt(2.0 * kHermiteWiden / kappa)
                                              : std::sqrt(2.0 / kappa);
}

template <class Estimate>
QuadratureResult refine(Estimate&& estimate, int points, double rel_tol, int max_points) {
  int n = points;
  cplx coarse = estimate(n);
  while (2 * n <= max_points) {
    const cplx fine = estimate(2 * n);
    const double err = std::abs(fine - coarse);
    if (err <= rel_tol * std::abs(fine) || (fine == 0.0 && coarse == 0.0)) {
      return {fine, err, 2 * n};
    }
    coarse = fine;
    n *= 2;
  }
  std::ostringstream msg;
  msg << "quadrature did not reach rel_tol " << rel_tol << " with " << n << " points per axis";
  throw ToleranceNotMetError(msg.str());
}

// Gaussian envelope exp(-1/2 z^T K z + g.z) of a product exponent.
struct Envelope {
  Mat2d K;
  Vec2d g;
};

Envelope envelope_of(const PhaseExponent& e) { return {-e.Q.real(), e.g.real()}; }

PhaseExponent product_exponent(const PhaseSpaceGaussian& F1, const PhaseSpaceGaussian& F2) {
  const PhaseExponent e1 = F1.exponent(), e2 = F2.exponent();
  return {std::conj(e1.c0) + e2.c0, e1.g.conjugate() + e2.g, e1.Q.conjugate() + e2.Q};
}

void fit_2d(QuadratureSpec& spec, const Envelope& env) {
  Eigen::SelfAdjointEigenSolver<Mat2d> es(0.5 * (env.K + env.K.transpose()));
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw DivergentIntegralError("integrand envelope is not decaying in every direction");
  }
  spec.center = env.K.inverse() * env.g;
  spec.axes = es.eigenvectors();
  for (int j = 0; j < 2; ++j) spec.scale(j) = envelope_scale(spec.rule, es.eigenvalues()(j));
}

bool has_negative_direction(const PhaseSpaceGaussian& F) {
  Eigen::SelfAdjointEigenSolver<Mat2d> es(0.5 * (F.real_form() + F.real_form().transpose()));
  return es.eigenvalues().minCoeff() < -1e-10;
}

// 1-D pairing along the transversal line of a real frame.
cplx real_line_inner(const PhaseSpaceGaussian& F1, const PhaseSpaceGaussian& F2,
                     const QuadratureSpec& spec) {
  const Vec2d u = real_transversal(F1.frame);
  const PhaseExponent e = product_exponent(F1, F2);
  const Vec2c uc = u.cast<cplx>();
  const double kappa = -(uc.transpose() * e.Q * uc)(0).real();
  if (!(kappa > 0.0)) throw DivergentIntegralError("real-polarization pairing diverges");
  const double lin = (e.g.transpose() * uc)(0).real();
  double center = lin / kappa, scale = envelope_scale(spec.rule, kappa);
  if (!spec.fit_to_integrand) {
    center = spec.center(0);
    scale = spec.scale(0);
  }
  const auto f = [&](double s) {
    return std::conj(F1(s * u(0), s * u(1))) * F2(s * u(0), s * u(1));
  };
  return kSqrtPi * integrate_1d(f, center, scale, spec.rule, spec.points_per_axis, spec.rel_tol,
                                spec.max_points)
                       .value;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (points_per_axis < 16) throw std::invalid_argument("points_per_axis must be >= 16");
  if (!(scale(0) > 0.0) || !(scale(1) > 0.0)) throw std::invalid_argument("scale must be > 0");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be > 0");
}

const HermiteRule& gauss_hermite_rule(int n) {
  static std::mutex mu;
  static std::map<int, HermiteRule> cache;
  if (n < 1 || n > 1024) throw std::invalid_argument("Gauss-Hermite order out of range");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_hermite(n)).first;
  return it->second;
}

QuadratureResult integrate_1d(const std::function<cplx(double)>& f, double center, double scale,
                              QuadratureRule rule, int points, double rel_tol, int max_points) {
  const auto estimate = [&](int n) {
    std::vector<double> y, w;
    axis_rule(rule, n, y, w);
    cplx sum = 0.0;
    for (int k = 0; k < n; ++k) {
      if (w[k] == 0.0) continue;
      sum += w[k] * f(center + scale * y[k]);
    }
    return sum * scale;
  };
  return refine(estimate, points, rel_tol, max_points);
}

QuadratureResult integrate_2d(const std::function<cplx(double, double)>& f,
                              const QuadratureSpec& spec) {
  spec.validate();
  const Mat2d J = spec.axes * spec.scale.asDiagonal();
  const double jac = std::abs(J.determinant());
  const auto estimate = [&](int n) {
    std::vector<double> y, w;
    axis_rule(spec.rule, n, y, w);
    cplx sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (w[i] == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        if (w[j] == 0.0) continue;
        const Vec2d z = spec.center + J * Vec2d(y[i], y[j]);
        sum += w[i] * w[j] * f(z(0), z(1));
      }
    }
    return sum * jac;
  };
  return refine(estimate, spec.points_per_axis, spec.rel_tol, spec.max_points);
}

double quad_norm_schrodinger(const GaussianSuperposition& psi, const QuadratureSpec& spec) {
  spec.validate();
  if (psi.empty()) return 0.0;
  double kappa = std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [c, g] : psi.terms) {
    if (!g.normalizable()) throw DivergentIntegralError("superposition term is not normalizable");
    const LineExponent k = g.exponent();
    kappa = std::min(kappa, -4.0 * k.k2.real());
    const double peak = -k.k1.real() / (2.0 * k.k2.real());
    lo = std::min(lo, peak);
    hi = std::max(hi, peak);
  }
  double center = 0.5 * (lo + hi);
  double scale = std::max(envelope_scale(spec.rule, kappa), 0.5 * (hi - lo));
  if (!spec.fit_to_integrand) {
    center = spec.center(0);
    scale = spec.scale(0);
  }
  const auto f = [&](double x) { return cplx(std::norm(psi(x)), 0.0); };
  return kSqrtPi *
         integrate_1d(f, center, scale, spec.rule, spec.points_per_axis, spec.rel_tol,
                      spec.max_points)
             .value.real();
}

cplx quad_inner_schrodinger(const LineGaussian& a, const LineGaussian& b,
                            const QuadratureSpec& spec) {
  spec.validate();
  const LineExponent ka = a.exponent(), kb = b.exponent();
  const double kappa = -2.0 * (ka.k2.real() + kb.k2.real());
  if (!(kappa > 0.0)) throw DivergentIntegralError("line pairing diverges");
  double center = (ka.k1.real() + kb.k1.real()) / kappa;
  double scale = envelope_scale(spec.rule, kappa);
  if (!spec.fit_to_integrand) {
    center = spec.center(0);
    scale = spec.scale(0);
  }
  const auto f = [&](double x) { return std::conj(a(x)) * b(x); };
  return kSqrtPi *
         integrate_1d(f, center, scale, spec.rule, spec.points_per_axis, spec.rel_tol,
                      spec.max_points)
             .value;
}

IntegralResult quad_inner_polarized(const PhaseSpaceGaussian& F1, const PhaseSpaceGaussian& F2,
                                    double density, const QuadratureSpec& spec_in) {
  spec_in.validate();
  if (!F1.frame.same_as(F2.frame)) {
    throw FrameMismatchError("quad_inner_polarized: sections live in different frames");
  }
  if (F1.is_zero() || F2.is_zero()) return {};
  if (has_negative_direction(F1) || has_negative_direction(F2) || density < -kClassEps) {
    return IntegralResult::diverges();
  }
  if (std::abs(density) <= kClassEps) return {real_line_inner(F1, F2, spec_in), false};
  QuadratureSpec spec = spec_in;
  if (spec.fit_to_integrand) fit_2d(spec, envelope_of(product_exponent(F1, F2)));
  const auto f = [&](double x, double p) { return std::conj(F1(x, p)) * F2(x, p); };
  return {std::sqrt(density) * integrate_2d(f, spec).value, false};
}

NormResult quad_norm_polarized(const PhaseSpaceGaussian& F, double density,
                               const QuadratureSpec& spec) {
  const IntegralResult r = quad_inner_polarized(F, F, density, spec);
  if (r.divergent) return {0.0, true};
  return {r.value.real(), false};
}

LineGaussian riccati_ode_oracle(double alpha, double t_final, Center Y, const OdeSpec& spec) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 8>;  // (Q, P, b, C) as re/im pairs
  if (!(alpha > 0.0)) throw NonHyperbolicError("riccati_ode_oracle needs alpha > 0");
  if (!(t_final >= 0.0)) throw OutOfRangeError("riccati_ode_oracle integrates forward only");

  const double a2 = alpha * alpha;
  const double bound = spec.blow_up;
  const auto rhs = [a2, bound](const State& s, State& ds, double) {
    const cplx Q(s[0], s[1]), P(s[2], s[3]), b(s[4], s[5]), C(s[6], s[7]);
    if (std::abs(b) > bound) throw BlowUpError("width parameter left the bounded region");
    const cplx dQ = kI * P;
    const cplx dP = kI * a2 * Q;
    const cplx db = -(a2 + b * b);
    const cplx dC = (0.5 * (P * P + a2 * Q * Q) - 0.5 * b) * C;
    ds = {dQ.real(), dQ.imag(), dP.real(), dP.imag(), db.real(), db.imag(), dC.real(), dC.imag()};
  };
  State s{Y.Q, 0.0, Y.P, 0.0, 1.0, 0.0, 1.0 / kSqrtPi, 0.0};
  if (t_final > 0.0) {
    if (spec.method == OdeMethod::DormandPrinceAdaptive) {
      auto stepper = odeint::make_controlled(spec.abs_tol, spec.rel_tol, spec.max_step,
                                             odeint::runge_kutta_dopri5<State>());
      odeint::integrate_adaptive(stepper, rhs, s, 0.0, t_final, std::min(spec.max_step, t_final));
    } else {
      const int steps = std::max(1, static_cast<int>(std::ceil(t_final / spec.max_step)));
      odeint::integrate_n_steps(odeint::runge_kutta4<State>(), rhs, s, 0.0, t_final / steps,
                                steps);
    }
  }
  if (std::abs(cplx(s[4], s[5])) > bound) throw BlowUpError("width parameter blew up");
  LineGaussian psi;
  psi.center_q = cplx(s[0], s[1]);
  psi.center_p = cplx(s[2], s[3]);
  psi.width = cplx(s[4], s[5]);
  psi.prefactor = cplx(s[6], s[7]);
  psi.frame = HalfFormFrame::dx();
  return psi;
}

namespace {

template <class Transform>
double gram_defect(std::span<const Center> Ys, double density, Transform&& U) {
  std::vector<LineGaussian> psi;
  std::vector<PhaseSpaceGaussian> images;
  for (const Center& Y : Ys) {
    psi.push_back(coherent_state(Y));
    images.push_back(U(Y));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < Ys.size(); ++i) {
    for (std::size_t j = 0; j < Ys.size(); ++j) {
      const IntegralResult pol = polarized_inner(images[i], images[j], density);
      if (pol.divergent) throw DivergentIntegralError("polarized Gram entry diverges");
      worst = std::max(worst, std::abs(pol.value - schrodinger_inner(psi[i], psi[j])));
    }
  }
  return worst;
}

}  // namespace

double gram_isometry_defect(std::span<const Center> Ys, double alpha, double t) {
  const CanonicalHyperbolic H(alpha);
  const double density = kahler_density(H.hamiltonian(), t);
  return gram_defect(Ys, std::abs(density) <= kClassEps ? 0.0 : density,
                     [&](Center Y) { return ksh_transform(H, t, Y); });
}

double gram_isometry_defect(std::span<const Center> Ys, const QuadraticHamiltonian& H, double t) {
  const double density = kahler_density(H, t);
  return gram_defect(Ys, std::abs(density) <= kClassEps ? 0.0 : density,
                     [&](Center Y) { return ksh_conjugated(H, t, Y); });
}

FlowMatrix matrix_exp_oracle(const Mat2c& A, cplx tau, int taylor_terms) {
  const Mat2c X = tau * A;
  const double norm = X.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat2c Y = X / std::ldexp(1.0, squarings);
  Mat2c sum = Mat2c::Identity(), term = Mat2c::Identity();
  for (int k = 1; k <= taylor_terms; ++k) {
    term = term * Y / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return {sum, tau};
}

}  // namespace hyperksh::verify
