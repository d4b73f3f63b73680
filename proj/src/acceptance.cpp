#include "hyperksh/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "hyperksh/gaussian_states.hpp"
#include "hyperksh/quadratic_dynamics.hpp"
#include "hyperksh/transforms.hpp"
#include "hyperksh/verify.hpp"

namespace hyperksh::acceptance {

namespace {

using Rng = std::mt19937_64;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void check(bool ok) { passed = passed && ok; }
};

const double kAlphas[] = {0.5, 1.0, 2.0};

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << v;
  return s.str();
}

// Nine interior times of (0, pi / 2 alpha).
std::vector<double> interior_times(double alpha) {
  std::vector<double> ts;
  for (int k = 1; k <= 9; ++k) ts.push_back(k * kPi / (20.0 * alpha));
  return ts;
}

std::vector<Center> y_grid_5x5() {
  std::vector<Center> ys;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) ys.push_back({-2.0 + i, -2.0 + j});
  }
  return ys;
}

std::vector<PhasePoint> xp_grid(double lo, double hi, int n) {
  std::vector<PhasePoint> pts;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      pts.push_back({lo + (hi - lo) * i / (n - 1), lo + (hi - lo) * j / (n - 1)});
    }
  }
  return pts;
}

Center random_center(Rng& rng, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  const double P = u(rng);
  return {P, u(rng)};
}

double max_pointwise(const std::function<cplx(double, double)>& f,
                     const std::function<cplx(double, double)>& g,
                     const std::vector<PhasePoint>& pts) {
  double worst = 0.0;
  for (const auto& z : pts) worst = std::max(worst, std::abs(f(z.x, z.p) - g(z.x, z.p)));
  return worst;
}

double max_abs(const std::function<cplx(double, double)>& f, const std::vector<PhasePoint>& pts) {
  double m = 0.0;
  for (const auto& z : pts) m = std::max(m, std::abs(f(z.x, z.p)));
  return m;
}

double parameter_distance(const PhaseSpaceGaussian& a, const PhaseSpaceGaussian& b) {
  double d = std::abs(a.prefactor - b.prefactor);
  d = std::max(d, std::abs(a.center.P - b.center.P));
  d = std::max(d, std::abs(a.center.Q - b.center.Q));
  d = std::max(d, (a.quad_form - b.quad_form).cwiseAbs().maxCoeff());
  d = std::max(d, (a.linear_phase - b.linear_phase).cwiseAbs().maxCoeff());
  d = std::max(d, std::abs(a.frame.coordinate.a - b.frame.coordinate.a));
  d = std::max(d, std::abs(a.frame.coordinate.b - b.frame.coordinate.b));
  return d;
}

// A random hyperbolic H with the given sign of h11.
QuadraticHamiltonian random_hyperbolic(Rng& rng, double sign) {
  std::uniform_real_distribution<double> mag(0.2, 5.0), cross(-2.0, 2.0), al(0.5, 2.0);
  const double h11 = sign * mag(rng);
  const double h12 = cross(rng);
  const double alpha = al(rng);
  return {h11, h12, (h12 * h12 - alpha * alpha) / h11};
}

verify::QuadratureSpec tight_spec() {
  verify::QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  return spec;
}

// 1. closed-form and quadrature norms of U_t psi_Y.
void unitarity(const Options&, Outcome& out) {
  double closed = 0.0, quad = 0.0;
  int count = 0;
  for (double alpha : kAlphas) {
    const CanonicalHyperbolic H(alpha);
    for (double t : interior_times(alpha)) {
      const double density = kahler_density(H.hamiltonian(), t);
      for (const Center& Y : y_grid_5x5()) {
        const PhaseSpaceGaussian F = ksh_transform(H, t, Y);
        const IntegralResult n = polarized_inner(F, F, density);
        const verify::NormResult q = verify::quad_norm_polarized(F, density, tight_spec());
        out.check(!n.divergent && !q.divergent);
        closed = std::max(closed, std::abs(n.value - 1.0));
        quad = std::max(quad, std::abs(q.value - 1.0));
        ++count;
      }
    }
  }
  out.check(closed <= 1e-12 && quad <= 1e-8);
  out.detail << count << " states; max|norm-1| closed " << sci(closed) << " (tol 1e-12), quadrature "
             << sci(quad) << " (tol 1e-8)";
}

// 2. Gram matrices of six random coherent states per (alpha, t).
void gram_isometry(const Options& opt, Outcome& out) {
  Rng rng(opt.seed);
  double worst = 0.0;
  int sets = 0;
  for (double alpha : kAlphas) {
    for (double t : interior_times(alpha)) {
      std::vector<Center> ys;
      for (int k = 0; k < 6; ++k) ys.push_back(random_center(rng, 2.0));
      worst = std::max(worst, verify::gram_isometry_defect(ys, alpha, t));
      ++sets;
    }
  }
  out.check(worst <= 1e-8);
  out.detail << sets << " six-state sets; max Gram defect " << sci(worst) << " (tol 1e-8)";
}

// 3. W and V shifts commute with U_t at parameter level, V with the phase e^{-i P0 Q}.
void intertwining(const Options& opt, Outcome& out) {
  Rng rng(opt.seed + 3);
  std::uniform_real_distribution<double> shift(-2.0, 2.0), frac(0.05, 0.95);
  std::uniform_int_distribution<int> pick(0, 2);
  double w_err = 0.0, v_err = 0.0, v_pointwise = 0.0;
  const auto pts = xp_grid(-2.0, 2.0, 5);
  for (int n = 0; n < 100; ++n) {
    const double alpha = kAlphas[pick(rng)];
    const CanonicalHyperbolic H(alpha);
    const double t = frac(rng) * kPi / (2.0 * alpha);
    const Center Y = random_center(rng, 2.0);
    const double P0 = shift(rng), Q0 = shift(rng);
    const PhaseSpaceGaussian U = ksh_transform(H, t, Y);

    const PhaseSpaceGaussian wU = heisenberg_shift(HeisenbergKind::W, Q0, U);
    w_err = std::max(w_err, parameter_distance(wU, ksh_transform(H, t, {Y.P, Y.Q + Q0})));

    const PhaseSpaceGaussian vU = heisenberg_shift(HeisenbergKind::V, P0, U);
    PhaseSpaceGaussian expected = ksh_transform(H, t, {Y.P + P0, Y.Q});
    expected.prefactor *= std::exp(-kI * P0 * Y.Q);
    v_err = std::max(v_err, parameter_distance(vU, expected));

    // U (V psi_Y) through the generic engine against V (U psi_Y), pointwise.
    const LineGaussian v_psi = heisenberg_shift(HeisenbergKind::V, P0, coherent_state(Y));
    const PhaseSpaceGaussian uv = ksh_factorized(H.hamiltonian(), t, v_psi);
    v_pointwise = std::max(v_pointwise, max_pointwise(uv, vU, pts));
  }
  out.check(w_err <= 1e-12 && v_err <= 1e-12 && v_pointwise <= 1e-12);
  out.detail << "100 tuples; W " << sci(w_err) << ", V " << sci(v_err) << ", U(V psi) vs V(U psi) "
             << sci(v_pointwise) << " (tol 1e-12)";
}

// 4. U at alpha t = pi/2 against sqrt(i) e^{-ipx} F psi_Y.
void fourier_endpoint(const Options&, Outcome& out) {
  const std::vector<Center> ys = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {-1.5, 0.5}, {0.7, -2.0}};
  const auto pts = xp_grid(-3.0, 3.0, 11);
  const cplx sqrt_i = std::exp(kI * kPi / 4.0);
  double worst = 0.0;
  for (double alpha : kAlphas) {
    const CanonicalHyperbolic H(alpha);
    for (const Center& Y : ys) {
      const PhaseSpaceGaussian U =
          halfform_convert(ksh_transform(H, PiRational{1, 2}, Y), HalfFormFrame::dp());
      const LineGaussian F = fourier_on_gaussian(coherent_state(Y));
      worst = std::max(worst, max_pointwise(U,
                                            [&](double x, double p) {
                                              return sqrt_i * momentum_gauge_factor(x, p) * F(p);
                                            },
                                            pts));
    }
  }
  out.check(worst <= 1e-10);
  out.detail << "alpha in {0.5,1,2}, 5 centers, 11x11 grid; max deviation " << sci(worst)
             << " (tol 1e-10)";
}

// 5. Segal-Bargmann at t~ = tan t against U_t, alpha = 1.
void sb_equivalence(const Options&, Outcome& out) {
  const CanonicalHyperbolic H(1.0);
  const std::vector<Center> ys = {{0.0, 0.0}, {1.0, -1.0}, {-0.5, 2.0}, {2.0, 0.3}};
  const auto pts = xp_grid(-3.0, 3.0, 11);
  double pointwise = 0.0, constant = 0.0;
  for (double t : {kPi / 8.0, kPi / 6.0, kPi / 4.0, kPi / 3.0}) {
    const double expected = std::sqrt(std::cos(t));
    for (const Center& Y : ys) {
      const PhaseSpaceGaussian sb = segal_bargmann(std::tan(t), Y);
      const PhaseSpaceGaussian U = ksh_transform(H, t, Y);
      pointwise = std::max(pointwise, max_pointwise(sb, halfform_convert(U, sb.frame), pts));
      // least-squares constant c with sb = c U on the grid
      cplx num = 0.0;
      double den = 0.0;
      for (const auto& z : pts) {
        num += std::conj(U(z.x, z.p)) * sb(z.x, z.p);
        den += std::norm(U(z.x, z.p));
      }
      constant = std::max(constant, std::abs(num / den - expected));
    }
  }
  out.check(pointwise <= 1e-9 && constant <= 1e-9);
  out.detail << "t in {pi/8,pi/6,pi/4,pi/3}; pointwise " << sci(pointwise)
             << ", |c - cos(t)^{1/2}| " << sci(constant) << " (tol 1e-9)";
}

bool consistent_with_density(const PolarizationClass& c, int sign) {
  switch (c.tag) {
    case PolarizationTag::Kahler: return sign > 0;
    case PolarizationTag::AntiKahler: return sign < 0;
    default: return sign == 0;
  }
}

// 6. sign table, periodicity and exact boundary branches.
void phase_diagram(const Options& opt, Outcome& out) {
  Rng rng(opt.seed + 6);
  std::vector<QuadraticHamiltonian> hs;
  for (double alpha : kAlphas) hs.push_back(QuadraticHamiltonian::canonical(alpha));
  hs.push_back(random_hyperbolic(rng, 1.0));
  hs.push_back(random_hyperbolic(rng, -1.0));
  int mismatches = 0, aperiodic = 0, boundary_bad = 0, points = 0;
  for (const auto& H : hs) {
    const double alpha = H.alpha();
    for (int i = 0; i < 1000; ++i) {
      const double t = i * (2.0 * kPi / alpha) / 999.0;
      const PolarizationClass c = classify_polarization(H, t);
      if (!consistent_with_density(c, kahler_sign(H, t))) ++mismatches;
      if (!(classify_polarization(H, t + kPi / alpha) == c)) ++aperiodic;
      ++points;
    }
    for (long k = 0; k <= 8; ++k) {
      const PolarizationClass c = classify_polarization(H, PiRational{k, 2});
      const bool ok = k % 2 == 0
                          ? c.tag == PolarizationTag::Schrodinger
                          : c.tag == PolarizationTag::RealLine && c.direction &&
                                c.direction->first == H.h12 && c.direction->second == H.h11;
      if (!ok) ++boundary_bad;
    }
  }
  out.check(mismatches == 0 && aperiodic == 0 && boundary_bad == 0);
  out.detail << points << " grid points over " << hs.size() << " Hamiltonians; sign mismatches "
             << mismatches << ", periodicity breaks " << aperiodic << ", bad exact boundaries "
             << boundary_bad;
}

// 7. anti-Kahler times have no normalizable image.
void anti_kahler(const Options&, Outcome& out) {
  const CanonicalHyperbolic H(1.0);
  int divergent = 0, total = 0;
  double max_min_eig = -std::numeric_limits<double>::infinity();
  for (double t : {1.8, 2.0, 2.5}) {
    const double density = kahler_density(H.hamiltonian(), t);
    for (const Center& Y : {Center{0.0, 0.0}, Center{1.0, -1.0}, Center{-2.0, 0.5}}) {
      const PhaseSpaceGaussian F = ksh_transform(H, t, Y);
      Eigen::SelfAdjointEigenSolver<Mat2d> es(F.real_form());
      max_min_eig = std::max(max_min_eig, es.eigenvalues().minCoeff());
      if (verify::quad_norm_polarized(F, density).divergent) ++divergent;
      ++total;
    }
  }
  out.check(max_min_eig < 0.0 && divergent == total);
  out.detail << "t in {1.8,2.0,2.5}; largest min eig Re(M) " << sci(max_min_eig) << ", divergent "
             << divergent << "/" << total;
}

// 8. reduction of 20 random H, norm and polarization of the conjugated transform.
void reduction(const Options& opt, Outcome& out) {
  Rng rng(opt.seed + 8);
  std::uniform_real_distribution<double> unit(-3.0, 3.0), frac(0.15, 0.85);
  std::vector<PhasePoint> samples;
  for (int k = 0; k < 100; ++k) {
    const double x = unit(rng);
    samples.push_back({x, unit(rng)});
  }
  const auto grid = xp_grid(-2.0, 2.0, 5);
  double residual = 0.0, closed = 0.0, quad = 0.0, polar = 0.0;
  for (int n = 0; n < 20; ++n) {
    const QuadraticHamiltonian H = random_hyperbolic(rng, n % 2 == 0 ? 1.0 : -1.0);
    const ReductionData R = canonical_reduction(H);
    residual = std::max(residual, reduction_pullback_residual(H, R, samples));
    const double alpha = H.alpha();
    // Kahler window: (0, pi/2 alpha) for h11 > 0, (pi/2 alpha, pi/alpha) for h11 < 0
    const double t = (frac(rng) + (H.h11 > 0.0 ? 0.0 : 1.0)) * kPi / (2.0 * alpha);
    const double density = kahler_density(H, t);
    const Center Y = random_center(rng, 1.5);
    const PhaseSpaceGaussian F = ksh_conjugated(H, t, Y);
    const IntegralResult c = polarized_inner(F, F, density);
    const verify::NormResult q = verify::quad_norm_polarized(F, density, tight_spec());
    out.check(!c.divergent && !q.divergent);
    closed = std::max(closed, std::abs(c.value - 1.0));
    quad = std::max(quad, std::abs(q.value - 1.0));
    polar = std::max(polar, polarization_residual(F, holomorphic_coordinate(H, t), grid));
  }
  out.check(residual < 1e-10 && closed <= 1e-8 && quad <= 1e-8 && polar < 1e-8);
  out.detail << "20 H; pullback " << sci(residual) << " (tol 1e-10), |norm-1| closed "
             << sci(closed) << " quadrature " << sci(quad) << " (tol 1e-8), polarization "
             << sci(polar) << " (tol 1e-8)";
}

// 9. ODE, matrix exponential and factorization oracles.
void oracles(const Options& opt, Outcome& out) {
  double ode = 0.0;
  for (double alpha : kAlphas) {
    const CanonicalHyperbolic H(alpha);
    for (int k = 1; k <= 9; ++k) {
      const double t = k / 9.0 * 0.45 * kPi / alpha;
      for (const Center& Y : {Center{0.0, 0.0}, Center{1.0, 1.0}, Center{-0.5, 1.5}}) {
        const LineGaussian a = verify::riccati_ode_oracle(alpha, t, Y);
        const LineGaussian b = heat_semigroup(H, t, Y);
        ode = std::max({ode, std::abs(a.width - b.width), std::abs(a.center_p - b.center_p),
                        std::abs(a.center_q - b.center_q),
                        std::abs(std::abs(a.prefactor) - std::abs(b.prefactor))});
      }
    }
  }

  Rng rng(opt.seed + 9);
  std::uniform_real_distribution<double> times(-3.0, 3.0);
  double mexp = 0.0;
  for (int n = 0; n < 50; ++n) {
    const QuadraticHamiltonian H = random_hyperbolic(rng, n % 2 == 0 ? 1.0 : -1.0);
    const cplx tau = n % 5 == 0 ? cplx(times(rng), 0.0) : cplx(0.0, times(rng));
    const Mat2c A = hamiltonian_generator(H).cast<cplx>();
    mexp = std::max(mexp, (flow_matrix(H, tau).entries - verify::matrix_exp_oracle(A, tau).entries)
                              .cwiseAbs()
                              .maxCoeff());
  }

  const auto pts = xp_grid(-3.0, 3.0, 11);
  double factor = 0.0;
  for (double alpha : kAlphas) {
    const CanonicalHyperbolic H(alpha);
    for (double t : interior_times(alpha)) {
      for (const Center& Y : {Center{0.0, 0.0}, Center{1.0, -1.0}, Center{-2.0, 0.5}}) {
        const PhaseSpaceGaussian direct = ksh_transform(H, t, Y);
        const PhaseSpaceGaussian composed =
            prequantum_evolution(H.hamiltonian(), t, heat_semigroup(H, t, Y));
        factor = std::max(factor, max_pointwise(direct, composed, pts) / max_abs(direct, pts));
      }
    }
  }
  out.check(ode <= 1e-6 && mexp <= 1e-10 && factor <= 1e-12);
  out.detail << "ODE " << sci(ode) << " (tol 1e-6), matrix exp " << sci(mexp)
             << " (tol 1e-10), factorization " << sci(factor) << " (tol 1e-12)";
}

// 10. w(t + 2 pi / alpha) = w(t).
void periodicity(const Options& opt, Outcome& out) {
  Rng rng(opt.seed + 10);
  std::vector<QuadraticHamiltonian> hs;
  for (double alpha : kAlphas) hs.push_back(QuadraticHamiltonian::canonical(alpha));
  for (int n = 0; n < 5; ++n) hs.push_back(random_hyperbolic(rng, n % 2 == 0 ? 1.0 : -1.0));
  double worst = 0.0;
  for (const auto& H : hs) {
    const double period = 2.0 * kPi / H.alpha();
    for (int i = 0; i < 100; ++i) {
      const double t = i * period / 100.0;
      const HolomorphicCoordinate w0 = holomorphic_coordinate(H, t);
      const HolomorphicCoordinate w1 = holomorphic_coordinate(H, t + period);
      worst = std::max({worst, std::abs(w0.a - w1.a), std::abs(w0.b - w1.b)});
    }
  }
  out.check(worst <= 1e-12);
  out.detail << hs.size() << " Hamiltonians x 100 times; max |w(t+T) - w(t)| " << sci(worst)
             << " (tol 1e-12)";
}

struct Entry {
  const char* id;
  const char* title;
  void (*run)(const Options&, Outcome&);
};

const Entry kEntries[] = {
    {"C1-unitarity", "unitarity of U_t on coherent states", unitarity},
    {"C2-gram-isometry", "finite-rank Gram isometry", gram_isometry},
    {"C3-intertwining", "Heisenberg intertwining", intertwining},
    {"C4-fourier-endpoint", "Fourier endpoint", fourier_endpoint},
    {"C5-sb-equivalence", "Segal-Bargmann equivalence", sb_equivalence},
    {"C6-phase-diagram", "polarization phase diagram", phase_diagram},
    {"C7-anti-kahler", "anti-Kahler collapse", anti_kahler},
    {"C8-reduction", "reduction to the canonical case", reduction},
    {"C9-oracles", "ODE, matrix exponential and factorization oracles", oracles},
    {"C10-periodicity", "periodicity of the holomorphic coordinate", periodicity},
};

const Entry& find_entry(const std::string& id) {
  for (const Entry& e : kEntries) {
    if (id == e.id) return e;
  }
  throw std::invalid_argument("unknown criterion id: " + id);
}

// Restores the mutation flag on scope exit.
class MutationScope {
 public:
  explicit MutationScope(bool on) : saved_(mutation::flip_width_sign()) {
    mutation::set_flip_width_sign(on);
  }
  ~MutationScope() { mutation::set_flip_width_sign(saved_); }
  MutationScope(const MutationScope&) = delete;
  MutationScope& operator=(const MutationScope&) = delete;

 private:
  bool saved_;
};

}  // namespace

std::vector<std::string> criterion_ids() {
  std::vector<std::string> ids;
  for (const Entry& e : kEntries) ids.emplace_back(e.id);
  return ids;
}

std::string criterion_title(const std::string& id) { return find_entry(id).title; }

CriterionResult run_criterion(const std::string& id, const Options& options) {
  const Entry& entry = find_entry(id);
  MutationScope scope(options.flip_width_sign);
  CriterionResult r{entry.id, entry.title, false, "", 0.0};
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    entry.run(options, out);
    r.passed = out.passed;
    r.detail = out.detail.str();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = out.detail.str() + std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_all(const Options& options) {
  std::vector<CriterionResult> results;
  for (const Entry& e : kEntries) results.push_back(run_criterion(e.id, options));
  return results;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "PASS " : "FAIL ") << r.id << ": " << r.detail << " [" << std::fixed
    << std::setprecision(2) << r.seconds << " s]";
  return s.str();
}

}  // namespace hyperksh::acceptance
