#include <cmath>

#include "doctest.h"

#include "hyperksh/transforms.hpp"
#include "hyperksh/verify.hpp"

using namespace hyperksh;
using namespace hyperksh::verify;

TEST_CASE("gauss-hermite rule") {
  for (int n : {16, 32, 64, 256, 512}) {
    const HermiteRule& r = gauss_hermite_rule(n);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(n));
    for (int k = 0; k < 8; ++k) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        sum += r.scaled_weights[i] * std::exp(-r.nodes[i] * r.nodes[i]) * std::pow(r.nodes[i], 2 * k);
      }
      CHECK(sum == doctest::Approx(std::tgamma(k + 0.5)).epsilon(1e-12));
    }
    for (int i = 0; i + 1 < n; ++i) CHECK(r.nodes[i] > r.nodes[i + 1]);
  }
  CHECK(&gauss_hermite_rule(32) == &gauss_hermite_rule(32));
  CHECK_THROWS_AS(gauss_hermite_rule(0), std::invalid_argument);
}

TEST_CASE("one-dimensional integration") {
  const auto gauss = [](double x) { return cplx(std::exp(-0.5 * x * x), 0.0); };
  for (QuadratureRule rule : {QuadratureRule::GaussHermite, QuadratureRule::TanhSinh}) {
    const QuadratureResult r = integrate_1d(gauss, 0.0, 2.0, rule, 32, 1e-12, 512);
    CHECK(std::abs(r.value - std::sqrt(2 * kPi)) < 1e-12);
    CHECK(r.points_per_axis >= 64);
  }
  const auto oscillating = [](double x) { return std::exp(cplx(-x * x, 40.0 * x)); };
  CHECK_THROWS_AS(integrate_1d(oscillating, 0.0, 1.0, QuadratureRule::GaussHermite, 16, 1e-14, 32),
                  ToleranceNotMetError);
}

TEST_CASE("quadrature spec validation") {
  QuadratureSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.points_per_axis = 8;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = {};
  spec.scale = Vec2d(1.0, 0.0);
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = {};
  spec.rel_tol = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("schrodinger norms by quadrature") {
  const GaussianSuperposition pair{{{1.0, coherent_state(0, 0)}, {1.0, coherent_state(0, 2)}}};
  CHECK(std::abs(quad_norm_schrodinger(pair) - (2.0 + 2.0 * std::exp(-1.0))) < 1e-10);
  CHECK(quad_norm_schrodinger({}) == 0.0);
  QuadratureSpec tanh;
  tanh.rule = QuadratureRule::TanhSinh;
  CHECK(std::abs(quad_norm_schrodinger({{{1.0, coherent_state(1.0, -3.0)}}}, tanh) - 1.0) < 1e-10);

  const LineGaussian wide{1.0, 0.0, 0.0, cplx(-0.2, 0.0), HalfFormFrame::dx()};
  CHECK_THROWS_AS(quad_norm_schrodinger({{{1.0, wide}}}), DivergentIntegralError);
}

TEST_CASE("polarized norms by quadrature") {
  const CanonicalHyperbolic H(1.0);
  const PhaseSpaceGaussian kahler = ksh_transform(H, kPi / 4, {0.0, 0.0});
  const NormResult k = quad_norm_polarized(kahler, 0.5);
  CHECK_FALSE(k.divergent);
  CHECK(std::abs(k.value - 1.0) < 1e-10);

  const PhaseSpaceGaussian anti = ksh_transform(H, 2.0, {0.0, 0.0});
  CHECK(quad_norm_polarized(anti, kahler_density(H.hamiltonian(), 2.0)).divergent);

  const PhaseSpaceGaussian real = ksh_transform(H, PiRational{1, 2}, {0.5, -1.0});
  const NormResult r = quad_norm_polarized(real, 0.0);
  CHECK_FALSE(r.divergent);
  CHECK(std::abs(r.value - 1.0) < 1e-10);

  const NormResult z = quad_norm_polarized(PhaseSpaceGaussian::zero(kahler.frame), 0.5);
  CHECK_FALSE(z.divergent);
  CHECK(z.value == 0.0);

  // cross terms agree with the closed form
  const PhaseSpaceGaussian other = ksh_transform(H, kPi / 4, {1.0, 0.5});
  const IntegralResult q = quad_inner_polarized(kahler, other, 0.5);
  CHECK(std::abs(q.value - polarized_inner(kahler, other).value) < 1e-10);
  CHECK(std::abs(q.value - schrodinger_inner(coherent_state(0, 0), coherent_state(1.0, 0.5))) < 1e-10);

  CHECK_THROWS_AS(quad_inner_polarized(kahler, real, 0.5), FrameMismatchError);
}

TEST_CASE("riccati ode oracle") {
  SUBCASE("centers") {
    const LineGaussian psi = riccati_ode_oracle(2.0, 0.2, {1.0, 1.0});
    CHECK(std::abs(psi.center_p - cplx(0.9210609940028851, 0.778836684617301)) < 1e-9);
    CHECK(std::abs(psi.center_q - cplx(0.9210609940028851, 0.19470917115432526)) < 1e-9);
  }
  SUBCASE("width reaches zero at the quarter period") {
    const LineGaussian psi = riccati_ode_oracle(1.0, kPi / 4, {});
    CHECK(std::abs(psi.width) < 1e-9);
    CHECK(std::abs(psi.prefactor - std::pow(2.0, -0.25) / std::sqrt(kPi)) < 1e-9);
  }
  SUBCASE("matches the closed form") {
    for (double a : {0.5, 1.0, 2.0}) {
      const CanonicalHyperbolic H(a);
      for (double t : {0.1, 0.5 * kPi / (2 * a), 0.9 * kPi / (2 * a)}) {
        const Center Y{0.6, -0.4};
        const LineGaussian ode = riccati_ode_oracle(a, t, Y);
        const LineGaussian closed = heat_semigroup(H, t, Y);
        for (double x : {-1.0, 0.0, 0.8}) CHECK(std::abs(ode(x) - closed(x)) < 1e-8);
        OdeSpec rk4;
        rk4.method = OdeMethod::Rk4Fixed;
        rk4.max_step = 1e-3;
        const LineGaussian fixed = riccati_ode_oracle(a, t, Y, rk4);
        for (double x : {-1.0, 0.0, 0.8}) CHECK(std::abs(ode(x) - fixed(x)) < 1e-8);
      }
    }
  }
  SUBCASE("blow-up past the singular time") {
    CHECK_THROWS_AS(riccati_ode_oracle(1.0, 2.5, {}), BlowUpError);
  }
  CHECK_THROWS_AS(riccati_ode_oracle(0.0, 0.1, {}), NonHyperbolicError);
  CHECK_THROWS_AS(riccati_ode_oracle(1.0, -0.1, {}), OutOfRangeError);
}

TEST_CASE("gram isometry") {
  const std::vector<Center> ys = {{0, 0}, {1, 0}, {0, 1}, {-1, 0.5}, {2, -1}, {0.3, 0.3}};
  CHECK(gram_isometry_defect(ys, 1.0, kPi / 6) < 1e-8);
  CHECK(gram_isometry_defect(ys, 2.0, 0.3) < 1e-8);
  CHECK(gram_isometry_defect(ys, 1.0, kPi / 2) < 1e-8);
  CHECK(gram_isometry_defect(ys, QuadraticHamiltonian{2, 1, -1}, 0.2) < 1e-8);
  CHECK(gram_isometry_defect(ys, QuadraticHamiltonian{-2, 1, 1}, 1.2) < 1e-8);
  CHECK_THROWS_AS(gram_isometry_defect(ys, 1.0, 2.0), DivergentIntegralError);

  // one entry by quadrature
  const CanonicalHyperbolic H(1.0);
  const double t = kPi / 6;
  const PhaseSpaceGaussian a = ksh_transform(H, t, ys[1]), b = ksh_transform(H, t, ys[4]);
  const IntegralResult q = quad_inner_polarized(a, b, kahler_density(H.hamiltonian(), t));
  CHECK(std::abs(q.value - schrodinger_inner(coherent_state(ys[1]), coherent_state(ys[4]))) < 1e-10);
}

TEST_CASE("matrix exponential oracle") {
  Mat2c A;
  A << 0, 1, 1, 0;
  const FlowMatrix E = matrix_exp_oracle(A, 1.0);
  CHECK(std::abs(E.entries(0, 0) - std::cosh(1.0)) < 1e-14);
  CHECK(std::abs(E.entries(0, 1) - std::sinh(1.0)) < 1e-14);
  A << 0, -1, 1, 0;
  const FlowMatrix R = matrix_exp_oracle(A, kPi);
  CHECK((R.entries + Mat2c::Identity()).cwiseAbs().maxCoeff() < 1e-13);
  A << 0, 1, 0, 0;
  const FlowMatrix N = matrix_exp_oracle(A, cplx(0.0, 2.0));
  CHECK(std::abs(N.entries(0, 1) - cplx(0.0, 2.0)) < 1e-15);
  CHECK(N.time == cplx(0.0, 2.0));
  // large argument goes through squaring
  A << 0, 4, 1, 0;
  const FlowMatrix L = matrix_exp_oracle(A, 5.0);
  CHECK(std::abs(L.entries(0, 0) / std::cosh(10.0) - 1.0) < 1e-12);
}
