#include <random>

#include "doctest.h"

#include "hyperksh/gaussian_states.hpp"
#include "hyperksh/verify.hpp"
#include "test_support.hpp"

using namespace hyperksh;

TEST_CASE("coherent state") {
  const LineGaussian psi = coherent_state(0.0, 0.0);
  CHECK(std::abs(psi(0.0) - 1.0 / std::sqrt(kPi)) < 1e-16);
  CHECK(std::abs(psi(1.0) - std::exp(-0.5) / std::sqrt(kPi)) < 1e-16);
  const LineGaussian moved = coherent_state({1.5, -0.5});
  // pi^{-1/2} exp(-1.5 i (x + 0.5) - (x + 0.5)^2 / 2) at x = 0.5
  CHECK(std::abs(moved(0.5) - std::exp(cplx(-0.5, -1.5)) / std::sqrt(kPi)) < 1e-15);
  CHECK(moved.normalizable());
  CHECK(moved.frame.same_as(HalfFormFrame::dx()));

  for (double P : {-2.0, 0.0, 1.3}) {
    for (double Q : {-1.0, 0.0, 2.5}) {
      const LineGaussian g = coherent_state(P, Q);
      CHECK(std::abs(schrodinger_inner(g, g) - 1.0) < 1e-14);
      CHECK(std::abs(verify::quad_norm_schrodinger({{{1.0, g}}}) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("line exponent round trip") {
  const LineGaussian g{cplx(0.3, -0.2), cplx(0.7, 0.1), cplx(-0.4, 0.2), cplx(1.3, 0.6),
                       HalfFormFrame::dx()};
  const LineExponent e = g.exponent();
  for (double x : {-1.0, 0.0, 0.4, 2.0}) CHECK(std::abs(std::exp(e(x)) - g(x)) < 1e-14);
  for (cplx q_ref : {cplx(0, 0), cplx(1.0, -0.5)}) {
    const LineGaussian h = LineGaussian::from_exponent(e, g.frame, q_ref);
    CHECK(h.center_q == q_ref);
    for (double x : {-1.0, 0.0, 0.4, 2.0}) CHECK(std::abs(h(x) - g(x)) < 1e-14);
  }
}

TEST_CASE("schrodinger inner products") {
  const LineGaussian origin = coherent_state(0.0, 0.0);
  for (double Q : {0.5, 1.0, 3.0}) {
    CHECK(std::abs(schrodinger_inner(origin, coherent_state(0.0, Q)) - std::exp(-Q * Q / 4)) <
          1e-15);
  }
  for (double P : {0.5, 1.0, 3.0}) {
    CHECK(std::abs(schrodinger_inner(origin, coherent_state(P, 0.0)) - std::exp(-P * P / 4)) <
          1e-15);
  }

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0), w(0.3, 2.0);
  for (int n = 0; n < 50; ++n) {
    const LineGaussian a{cplx(u(rng), u(rng)), cplx(u(rng), 0.2 * u(rng)), cplx(u(rng), 0.2 * u(rng)),
                         cplx(w(rng), 0.25 * u(rng)), HalfFormFrame::dx()};
    const LineGaussian b{cplx(u(rng), u(rng)), cplx(u(rng), 0.2 * u(rng)), cplx(u(rng), 0.2 * u(rng)),
                         cplx(w(rng), 0.25 * u(rng)), HalfFormFrame::dx()};
    const cplx ab = schrodinger_inner(a, b);
    CHECK(std::abs(ab - std::conj(schrodinger_inner(b, a))) <= 1e-13 * std::max(1.0, std::abs(ab)));
    const cplx q = verify::quad_inner_schrodinger(a, b);
    CHECK(std::abs(ab - q) <= 1e-9 * std::max(1.0, std::abs(ab)));
  }

  const LineGaussian spread{1.0, 0.0, 0.0, cplx(-1.5, 1.0), HalfFormFrame::dx()};
  CHECK_THROWS_AS(schrodinger_inner(spread, origin), DivergentIntegralError);
  LineGaussian other = origin;
  other.frame = HalfFormFrame::of({cplx(2.0, 0.0), 0.0});
  CHECK_THROWS_AS(schrodinger_inner(other, origin), FrameMismatchError);
  // |dw| = 2 |dx|
  CHECK(std::abs(schrodinger_inner(other, other) - 0.5) < 1e-15);
  other.frame = HalfFormFrame::dp();
  CHECK_THROWS_AS(schrodinger_inner(other, origin), FrameMismatchError);
}

TEST_CASE("superpositions") {
  const GaussianSuperposition pair{{{1.0, coherent_state(0, 0)}, {1.0, coherent_state(0, 2)}}};
  const double expected = 2.0 + 2.0 * std::exp(-1.0);
  CHECK(std::abs(schrodinger_inner(pair, pair).real() - expected) < 1e-14);
  CHECK(std::abs(verify::quad_norm_schrodinger(pair) - expected) < 1e-10);
  CHECK(verify::quad_norm_schrodinger({}) == 0.0);
  CHECK(schrodinger_inner(GaussianSuperposition{}, pair) == cplx(0.0, 0.0));
  CHECK(std::abs(pair(1.0) - 2.0 * std::exp(-0.5) / std::sqrt(kPi)) < 1e-15);
}

TEST_CASE("half-form frames") {
  const HalfFormFrame scaled = HalfFormFrame::of({cplx(2.0, 1.0), 0.0});
  CHECK(std::abs(scaled.jacobian_to(HalfFormFrame::dx()) - cplx(2.0, 1.0)) < 1e-15);
  CHECK(scaled.is_real());
  CHECK(HalfFormFrame::dp().is_real());
  CHECK_FALSE(HalfFormFrame::of({1.0, kI}).is_real());
  CHECK(HalfFormFrame::of({1.0, kI}).density() == 1.0);
  CHECK_THROWS_AS(HalfFormFrame::dx().jacobian_to(HalfFormFrame::dp()), FrameMismatchError);

  const LineGaussian g = coherent_state(0.4, -0.3);
  LineGaussian in_scaled = g;
  in_scaled.frame = scaled;
  const LineGaussian in_dx = halfform_convert(in_scaled, HalfFormFrame::dx());
  CHECK(std::abs(in_dx(0.2) - std::sqrt(cplx(2.0, 1.0)) * g(0.2)) < 1e-15);
  const LineGaussian back = halfform_convert(in_dx, scaled);
  CHECK(std::abs(back(0.2) - g(0.2)) < 1e-15);
  CHECK(back.frame.same_as(scaled));

  const PhaseSpaceGaussian F = embed(g);
  const PhaseSpaceGaussian Fd = halfform_convert(F, HalfFormFrame::of({cplx(0.0, 1.0), 0.0}));
  // w_source = x = -i (i x)
  CHECK(std::abs(Fd(0.1, 0.5) - std::sqrt(cplx(0.0, -1.0)) * F(0.1, 0.5)) < 1e-15);
  CHECK_THROWS_AS(halfform_convert(F, HalfFormFrame::dp()), FrameMismatchError);
}

TEST_CASE("phase-space Gaussians") {
  PhaseSpaceGaussian F;
  F.prefactor = cplx(0.4, 0.1);
  F.center = {0.3, -0.2};
  F.quad_form << cplx(1.0, 0.2), cplx(0.1, 0.5), cplx(0.1, 0.5), cplx(0.7, -0.3);
  F.linear_phase = Vec2c(cplx(0.5, 0.0), cplx(-0.2, 0.1));
  F.frame = HalfFormFrame::of({1.0, kI});

  const PhaseExponent e = F.exponent();
  const auto pts = test_support::grid(-1.5, 1.5, 7);
  CHECK(test_support::max_diff([&](double x, double p) { return std::exp(e(x, p)); }, F, pts) < 1e-14);

  const PhaseSpaceGaussian G = PhaseSpaceGaussian::from_exponent(e, {1.0, 0.5}, F.frame);
  CHECK(test_support::max_diff(F, G, pts) < 1e-14);

  // gradient against central differences of the exponent
  const double h = 1e-6;
  for (const auto& z : pts) {
    const Vec2c grad = e.gradient(z.x, z.p);
    CHECK(std::abs(grad(0) - (e(z.x + h, z.p) - e(z.x - h, z.p)) / (2 * h)) < 1e-8);
    CHECK(std::abs(grad(1) - (e(z.x, z.p + h) - e(z.x, z.p - h)) / (2 * h)) < 1e-8);
  }
  CHECK(F.real_form()(0, 1) == 0.1);
}

TEST_CASE("embedding and the polarization residual") {
  const LineGaussian g = coherent_state(0.8, -1.1);
  const PhaseSpaceGaussian F = embed(g, {0.8, -1.1});
  const auto pts = test_support::grid(-2.0, 2.0, 9);
  for (const auto& z : pts) CHECK(std::abs(F(z.x, z.p) - g(z.x)) < 1e-15);
  CHECK(polarization_residual(F, HolomorphicCoordinate::position(), pts) == 0.0);

  PhaseSpaceGaussian bent = F;
  bent.quad_form(1, 1) = 0.5;
  CHECK(polarization_residual(bent, HolomorphicCoordinate::position(), pts) > 1e-3);

  LineGaussian wrong = g;
  wrong.frame = HalfFormFrame::dp();
  CHECK_THROWS_AS(embed(wrong), FrameMismatchError);
  CHECK(embed(LineGaussian{0.0, 0.0, 0.0, 1.0, HalfFormFrame::dx()}).is_zero());
}

TEST_CASE("heisenberg shifts on the line") {
  const LineGaussian w1 = heisenberg_shift(HeisenbergKind::W, 1.0, coherent_state(0, 0));
  const LineGaussian v0 = heisenberg_shift(HeisenbergKind::V, 0.0, coherent_state(0.3, 0.2));
  const LineGaussian v1 = heisenberg_shift(HeisenbergKind::V, 1.0, coherent_state(0, 2));
  const LineGaussian target_w = coherent_state(0, 1), target_v = coherent_state(1, 2);
  const LineGaussian same = coherent_state(0.3, 0.2);
  for (double x : {-1.0, 0.0, 0.5, 2.0}) {
    CHECK(std::abs(w1(x) - target_w(x)) < 1e-15);
    CHECK(std::abs(v0(x) - same(x)) < 1e-15);
    CHECK(std::abs(v1(x) - std::exp(cplx(0, -2)) * target_v(x)) < 1e-15);
    // V is multiplication by e^{-i P0 x}
    CHECK(std::abs(v1(x) - std::exp(cplx(0, -x)) * coherent_state(0, 2)(x)) < 1e-15);
  }

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 0; n < 50; ++n) {
    const double P0 = u(rng), Q0 = u(rng);
    const LineGaussian psi = coherent_state(u(rng), u(rng));
    const LineGaussian wv = heisenberg_shift(HeisenbergKind::W, Q0, heisenberg_shift(HeisenbergKind::V, P0, psi));
    const LineGaussian vw = heisenberg_shift(HeisenbergKind::V, P0, heisenberg_shift(HeisenbergKind::W, Q0, psi));
    const double x = u(rng);
    CHECK(std::abs(wv(x) - std::exp(kI * P0 * Q0) * vw(x)) < 1e-14);
    // unitary
    CHECK(std::abs(schrodinger_inner(wv, wv) - 1.0) < 1e-14);
  }
}

TEST_CASE("heisenberg shifts on sections") {
  const LineGaussian g = coherent_state(0.2, 0.7);
  const PhaseSpaceGaussian F = embed(g);
  const auto pts = test_support::grid(-2.0, 2.0, 7);
  const PhaseSpaceGaussian W = heisenberg_shift(HeisenbergKind::W, 0.6, F);
  const PhaseSpaceGaussian V = heisenberg_shift(HeisenbergKind::V, -0.9, F);
  CHECK(test_support::max_diff(W, [&](double x, double p) { return F(x - 0.6, p); }, pts) < 1e-15);
  CHECK(test_support::max_diff(
            V, [&](double x, double p) { return std::exp(kI * 0.9 * x) * F(x, p + 0.9); }, pts) <
        1e-14);
  const PhaseSpaceGaussian Z = PhaseSpaceGaussian::zero(HalfFormFrame::dx());
  CHECK(heisenberg_shift(HeisenbergKind::V, 1.0, Z).is_zero());
}

TEST_CASE("gaussian integrals") {
  const IntegralResult one = gaussian_integral_1d({0.0, 0.0, -0.5});
  CHECK(std::abs(one.value - std::sqrt(2 * kPi)) < 1e-15);
  CHECK(gaussian_integral_1d({0.0, 1.0, 0.0}).divergent);
  CHECK(gaussian_integral_1d({0.0, 0.0, cplx(0.1, -1.0)}).divergent);

  SUBCASE("diagonal with large imaginary parts") {
    const cplx k1(1.0, 10.0), k2(2.0, -7.0);
    Mat2c K = Mat2c::Zero();
    K(0, 0) = k1;
    K(1, 1) = k2;
    const IntegralResult r = gaussian_integral_2d(K, Vec2c::Zero(), 0.0);
    REQUIRE_FALSE(r.divergent);
    const cplx expected = 2 * kPi / (std::sqrt(k1) * std::sqrt(k2));
    CHECK(std::abs(r.value - expected) < 1e-14);
  }
  SUBCASE("full matrix against quadrature") {
    Mat2c K;
    K << cplx(2.0, 0.0), cplx(0.5, 0.3), cplx(0.5, 0.3), cplx(1.5, 0.2);
    const Vec2c J(cplx(0.3, 0.1), cplx(0.0, -0.2));
    const cplx c(0.1, 0.05);
    const IntegralResult r = gaussian_integral_2d(K, J, c);
    REQUIRE_FALSE(r.divergent);
    verify::QuadratureSpec spec;
    spec.fit_to_integrand = false;
    spec.scale = Vec2d(1.7, 1.7);
    const auto f = [&](double x, double p) {
      const Vec2c z(x, p);
      return std::exp(-0.5 * (z.transpose() * K * z)(0) + (J.transpose() * z)(0) + c);
    };
    const verify::QuadratureResult q = verify::integrate_2d(f, spec);
    CHECK(std::abs(r.value - q.value) < 1e-10 * std::abs(r.value));
  }
  SUBCASE("non-decaying direction") {
    Mat2c K;
    K << 1.0, 0.0, 0.0, -0.1;
    CHECK(gaussian_integral_2d(K, Vec2c::Zero(), 0.0).divergent);
  }
}

TEST_CASE("polarized inner products") {
  SUBCASE("real frame reduces to the line pairing") {
    const LineGaussian a = coherent_state(0.3, -0.5), b = coherent_state(-0.2, 0.4);
    const IntegralResult r = polarized_inner(embed(a), embed(b));
    REQUIRE_FALSE(r.divergent);
    CHECK(std::abs(r.value - schrodinger_inner(a, b)) < 1e-15);
  }
  SUBCASE("real transversal") {
    const Vec2d u = real_transversal(HalfFormFrame::dp());
    CHECK(u(0) == 0.0);
    CHECK(u(1) == 1.0);
    const HalfFormFrame tilted = HalfFormFrame::of({std::polar(2.0, 0.3), std::polar(4.0, 0.3)});
    const Vec2d v = real_transversal(tilted);
    CHECK(std::abs((tilted.coordinate(v(0), v(1)) / std::polar(1.0, 0.3)).real() - 1.0) < 1e-14);
    CHECK(std::abs(v(0) * 2.0 - v(1)) < 1e-15);
  }
  SUBCASE("kahler frame against quadrature") {
    PhaseSpaceGaussian F;
    F.prefactor = 0.5;
    F.center = {0.2, -0.1};
    F.quad_form << cplx(1.0, 0.1), cplx(0.0, 0.4), cplx(0.0, 0.4), cplx(0.8, -0.2);
    F.frame = HalfFormFrame::of({1.0, cplx(0.0, 0.5)});
    PhaseSpaceGaussian G = heisenberg_shift(HeisenbergKind::W, 0.4, F);
    const double d = F.frame.density();
    const IntegralResult exact = polarized_inner(F, G);
    const IntegralResult quad = verify::quad_inner_polarized(F, G, d);
    REQUIRE_FALSE(exact.divergent);
    REQUIRE_FALSE(quad.divergent);
    CHECK(std::abs(exact.value - quad.value) < 1e-10);
    CHECK(std::abs(exact.value - std::conj(polarized_inner(G, F).value)) < 1e-14);
  }
  SUBCASE("anti-kahler density diverges") {
    const PhaseSpaceGaussian F = embed(coherent_state(0, 0));
    CHECK(polarized_inner(F, F, -0.5).divergent);
  }
  SUBCASE("zero section") {
    const PhaseSpaceGaussian Z = PhaseSpaceGaussian::zero(HalfFormFrame::dx());
    const IntegralResult r = polarized_inner(Z, embed(coherent_state(0, 0)));
    CHECK_FALSE(r.divergent);
    CHECK(r.value == cplx(0.0, 0.0));
  }
  SUBCASE("frames must agree") {
    const PhaseSpaceGaussian F = embed(coherent_state(0, 0));
    PhaseSpaceGaussian G = F;
    G.frame = HalfFormFrame::of({1.0, kI});
    CHECK_THROWS_AS(polarized_inner(F, G), FrameMismatchError);
  }
}
