#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "rnm/model.hpp"
#include "rnm/quad.hpp"

using namespace rnm;

TEST_CASE("quadrature basics") {
  auto r1 = quad::integrate([](double x) { return x * x; }, 0.0, 1.0);
  CHECK(r1.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  auto r2 = quad::integrate_to_inf([](double x) { return std::exp(-x); }, 0.0);
  CHECK(r2.value == doctest::Approx(1.0).epsilon(1e-10));
  // oscillatory with known value: int_0^inf e^{-x} cos x = 1/2
  auto r3 = quad::integrate_to_inf(
      [](double x) { return std::exp(-x) * std::cos(x); }, 0.0);
  CHECK(r3.value == doctest::Approx(0.5).epsilon(1e-10));

  double xs[12], ws[12];
  quad::gauss_legendre(12, xs, ws);
  double wsum = 0.0, x22 = 0.0;
  for (int i = 0; i < 12; ++i) {
    wsum += ws[i];
    x22 += ws[i] * std::pow(xs[i], 22);
  }
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  // GL-12 is exact through degree 23
  CHECK(x22 == doctest::Approx(2.0 / 23.0).epsilon(1e-13));
}

TEST_CASE("dispersion relations") {
  CHECK(model::psi(Vec2(3.0, 4.0), 1.0) ==
        doctest::Approx(std::sqrt(26.0) - 1.0).epsilon(1e-14));
  CHECK(model::psi_norm(0.0, 1.0) == 0.0);
  CHECK(model::psi_norm(2.5, 0.0) == 2.5);
  // no cancellation at small momenta: psi ~ q^2/(2m)
  CHECK(model::psi_norm(1e-8, 1.0) ==
        doctest::Approx(0.5e-16).epsilon(1e-10));
  CHECK(model::omega(Vec2(3.0, 4.0), 1.0) ==
        doctest::Approx(std::sqrt(26.0)).epsilon(1e-14));
  // monotone and bounded below by the mass
  double prev = 0.0;
  for (double q : {0.0, 0.1, 0.7, 1.0, 3.0, 10.0, 100.0}) {
    const double ps = model::psi_norm(q, 0.7);
    CHECK(ps >= prev);
    CHECK(model::omega_norm(q, 0.7) >= 0.7);
    prev = ps;
  }
}

TEST_CASE("coupling and beta") {
  ModelParams p;  // m_p = m_b = g = 1
  CHECK(model::coupling_v_norm(1.0, p) ==
        doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-14));
  CHECK(model::beta_norm(1.0, p) ==
        doctest::Approx(std::pow(2.0, -0.25) / (2.0 * std::sqrt(2.0) - 1.0))
            .epsilon(1e-14));
  CHECK(model::beta_norm(1.0, p) == doctest::Approx(0.4599015).epsilon(1e-6));

  // defining identity (omega + psi) beta = v across parameter sets
  for (double mp : {0.0, 0.5, 1.0})
    for (double q : {0.0, 0.3, 1.0, 7.0, 40.0}) {
      ModelParams pp{mp, 0.8, 1.7};
      const double lhs = (model::omega_norm(q, pp.m_b) + model::psi_norm(q, pp.m_p)) *
                         model::beta_norm(q, pp);
      CHECK(lhs == doctest::Approx(model::coupling_v_norm(q, pp)).epsilon(1e-13));
    }
}

TEST_CASE("renormalization constant") {
  // equal-mass closed form over the (m, lambda) grid
  for (double m : {0.5, 1.0, 2.0})
    for (double lam : {0.5, 1.0, 2.0, 4.0}) {
      ModelParams p{m, m, 1.3};
      const double got = model::e_ren(p, Cutoff::finite(lam));
      const double want = model::e_ren_closed_equal_mass(m, 1.3, lam);
      CHECK(got == doctest::Approx(want).epsilon(1e-8));
    }
  ModelParams unit;
  CHECK(model::e_ren(unit, Cutoff::finite(1.0)) ==
        doctest::Approx(1.8958133).epsilon(1e-6));
  CHECK(model::e_ren(unit, Cutoff::finite(0.0)) == 0.0);
  // quadratic in g
  ModelParams pg{1.0, 1.0, 2.0};
  CHECK(model::e_ren(pg, Cutoff::finite(3.0)) ==
        doctest::Approx(4.0 * model::e_ren(unit, Cutoff::finite(3.0)))
            .epsilon(1e-10));
  CHECK_THROWS_AS(model::e_ren(unit, Cutoff::infinite()), std::invalid_argument);
}

TEST_CASE("coupling norm") {
  ModelParams p{1.0, 0.6, 1.1};
  for (double lam : {0.5, 2.0, 16.0}) {
    const double closed = model::coupling_norm2(p, Cutoff::finite(lam));
    CHECK(closed == doctest::Approx(2.0 * M_PI * p.g * p.g *
                                    (std::sqrt(lam * lam + 0.36) - 0.6))
                        .epsilon(1e-14));
    const double byquad =
        quad::integrate(
            [&p](double r) {
              const double v = model::coupling_v_norm(r, p);
              return 2.0 * M_PI * r * v * v;
            },
            0.0, lam)
            .value;
    CHECK(closed == doctest::Approx(byquad).epsilon(1e-10));
  }
}

TEST_CASE("levy density closed form vs subordination integral") {
  CHECK(model::levy_density(1.0, 0.0) ==
        doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-14));
  CHECK(model::levy_density(1.0, 1.0) ==
        doctest::Approx(std::exp(-1.0) / M_PI).epsilon(1e-14));

  // independent construction: nu(z) = int_0^inf (4 pi s)^{-1} e^{-|z|^2/4s}
  // * (2 sqrt(pi))^{-1} s^{-3/2} e^{-m^2 s} ds  (heat kernel against the
  // Levy measure of the tilted 1/2-stable subordinator)
  auto nu_subord = [](double r, double m) {
    auto f = [r, m](double s) {
      if (s <= 0.0) return 0.0;
      return std::exp(-r * r / (4.0 * s) - m * m * s) /
             (4.0 * M_PI * s * 2.0 * std::sqrt(M_PI) * std::pow(s, 1.5));
    };
    return quad::integrate_to_inf(f, 0.0, 0.0, 1e-11, 16384).value;
  };
  for (double m : {0.0, 0.7, 1.0})
    for (double r : {0.25, 1.0, 2.0, 5.0}) {
      CHECK(model::levy_density(r, m) ==
            doctest::Approx(nu_subord(r, m)).epsilon(1e-8));
    }
}

TEST_CASE("symbol reconstruction from the levy density") {
  for (double mp : {0.0, 0.5, 1.0})
    for (double q : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double want = model::psi_norm(q, mp);
      const double got = model::symbol_from_levy(q, mp);
      CHECK(std::abs(got - want) <= 1e-5 * (1.0 + want));
    }
  CHECK(model::symbol_from_levy(1.0, 1.0) ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-5));
}

TEST_CASE("jump rate and discarded variance") {
  CHECK(model::jump_rate(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (auto [eps, m] : {std::pair{0.5, 1.0}, {2.0, 0.7}, {1e-3, 1.0}}) {
    const double byquad =
        quad::integrate_to_inf(
            [m](double r) { return 2.0 * M_PI * r * model::levy_density(r, m); },
            eps, 0.0, 1e-12, 16384)
            .value;
    CHECK(model::jump_rate(eps, m) == doctest::Approx(byquad).epsilon(1e-9));
  }
  for (auto [eps, m] : {std::pair{0.5, 1.0}, {1e-2, 0.3}}) {
    const double byquad =
        quad::integrate(
            [m](double r) {
              return 2.0 * M_PI * r * r * r * model::levy_density(r, m);
            },
            0.0, eps)
            .value;
    CHECK(model::small_jump_variance(eps, m) ==
          doctest::Approx(byquad).epsilon(1e-9));
  }
  CHECK(model::small_jump_variance(1e-3, 0.0) == 1e-3);
  // stable for tiny m*eps: leading term eps (1 - (m eps)^2/6)
  CHECK(model::small_jump_variance(1e-3, 1e-3) ==
        doctest::Approx(1e-3).epsilon(1e-10));
}

TEST_CASE("jump radius sampling transform") {
  auto survival = [](double r, double eps, double m) {
    return (eps / r) * std::exp(-m * (r - eps));
  };
  // m = 0 closed form
  CHECK(model::invert_jump_survival(0.25, 2.0, 0.0) == doctest::Approx(8.0));
  for (double m : {0.4, 1.0})
    for (double u : {1e-6, 1e-3, 0.1, 0.5, 0.999}) {
      const double eps = 0.01;
      const double r = model::invert_jump_survival(u, eps, m);
      CHECK(r >= eps);
      CHECK(survival(r, eps, m) == doctest::Approx(u).epsilon(1e-10));
    }
  CHECK(model::invert_jump_survival(1.0, 0.3, 1.0) == doctest::Approx(0.3));
  // monotone: smaller u, larger radius
  const double r1 = model::invert_jump_survival(0.5, 0.1, 1.0);
  const double r2 = model::invert_jump_survival(0.1, 0.1, 1.0);
  CHECK(r2 > r1);
}

TEST_CASE("analytic symbol") {
  const complexd real_case = model::analytic_symbol(Vec2(3.0, 4.0), Vec2(), 1.0);
  CHECK(real_case.real() == doctest::Approx(std::sqrt(26.0) - 1.0));
  CHECK(real_case.imag() == doctest::Approx(0.0));
  // zeta = (0.5 i, 0), m_p = 1: psi = sqrt(1 - 0.25) - 1 < 0
  const complexd c = model::analytic_symbol(Vec2(), Vec2(0.5, 0.0), 1.0);
  CHECK(c.real() == doctest::Approx(std::sqrt(0.75) - 1.0).epsilon(1e-14));
  CHECK(c.imag() == doctest::Approx(0.0));
  CHECK(std::exp(-c).real() == doctest::Approx(1.1433638).epsilon(1e-6));
  CHECK_THROWS_AS(model::analytic_symbol(Vec2(), Vec2(1.0, 0.0), 1.0),
                  std::invalid_argument);
}
