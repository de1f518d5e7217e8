#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "rnm/grid.hpp"
#include "rnm/model.hpp"

using namespace rnm;
using grid::FieldVector;
using grid::GridParams;
using grid::GridSpec;

namespace {
grid::GridPtr small_grid() {
  GridParams gp;
  gp.radial = 96;
  gp.angular = 16;
  gp.r_max = 4.0;
  gp.breaks = {1.0, 2.0};
  return GridSpec::build(gp);
}
}  // namespace

TEST_CASE("construction and exact disc area") {
  auto g = small_grid();
  CHECK(g->n_nodes() == g->n_radial() * g->n_angular());
  CHECK(g->has_edge(1.0));
  CHECK(g->has_edge(2.0));
  CHECK(g->has_edge(4.0));
  // weights integrate the constant 1 to the disc area exactly (GL is exact
  // for the linear radial integrand r)
  CHECK(g->weight().sum() ==
        doctest::Approx(M_PI * 16.0).epsilon(1e-13));
  // no node on a panel edge, all strictly inside (0, r_max)
  for (int i = 0; i < g->n_radial(); ++i) {
    const double r = (g->radius())[i * g->n_angular()];
    CHECK(r > 0.0);
    CHECK(r < 4.0);
    CHECK(!g->has_edge(r));
  }
}

TEST_CASE("node set is exactly closed under k -> -k") {
  auto g = small_grid();
  const int A = g->n_angular();
  for (int i = 0; i < g->n_radial(); ++i)
    for (int a = 0; a < A / 2; ++a) {
      const int idx = i * A + a, opp = i * A + a + A / 2;
      CHECK(g->kx()[idx] == -g->kx()[opp]);
      CHECK(g->ky()[idx] == -g->ky()[opp]);
      CHECK(g->weight()[idx] == g->weight()[opp]);
    }
}

TEST_CASE("cutoff masking is an exact sub-rule") {
  auto g = small_grid();
  const int below = g->nodes_below(2.0);
  CHECK(below % g->n_angular() == 0);
  CHECK(below < g->n_nodes());
  for (int i = 0; i < g->n_nodes(); ++i) {
    if (i < below)
      CHECK(g->radius()[i] < 2.0);
    else
      CHECK(g->radius()[i] > 2.0);
  }
  CHECK(g->nodes_below(Cutoff::infinite()) == g->n_nodes());
  CHECK(g->nodes_below(4.0) == g->n_nodes());
  CHECK_THROWS_AS(g->nodes_below(1.5), std::invalid_argument);

  auto f = FieldVector::from_radial(g, [](double) { return 1.0; });
  auto masked = grid::cutoff_mask(Cutoff::finite(2.0), f);
  CHECK(std::abs(masked.amp()[below - 1]) == 1.0);
  CHECK(std::abs(masked.amp()[below]) == 0.0);
  // idempotent, and the infinite mask is the identity
  auto twice = grid::cutoff_mask(Cutoff::finite(2.0), masked);
  CHECK((twice.amp() - masked.amp()).abs().maxCoeff() == 0.0);
  auto all = grid::cutoff_mask(Cutoff::infinite(), f);
  CHECK((all.amp() - f.amp()).abs().maxCoeff() == 0.0);
}

TEST_CASE("masked coupling inner products match adaptive quadrature") {
  // the discrete <v_L | beta_L> drives the action identity residual, so it
  // must reproduce E^ren to well below the identity budget
  auto g = small_grid();
  ModelParams p;  // unit masses, g = 1
  auto v = FieldVector::from_radial(
      g, [&p](double r) { return model::coupling_v_norm(r, p); });
  auto beta = FieldVector::from_radial(
      g, [&p](double r) { return model::beta_norm(r, p); });
  for (double lam : {1.0, 2.0, 4.0}) {
    const Cutoff c = Cutoff::finite(lam);
    const auto vl = grid::cutoff_mask(c, v);
    const auto bl = grid::cutoff_mask(c, beta);
    const double quad_value = model::e_ren(p, c);
    CHECK(grid::inner(vl, bl).real() ==
          doctest::Approx(quad_value).epsilon(1e-10));
    CHECK(grid::inner(vl, bl).imag() == 0.0);
    CHECK(grid::norm2(vl) ==
          doctest::Approx(model::coupling_norm2(p, c)).epsilon(1e-10));
  }
}

TEST_CASE("refinement stability") {
  ModelParams p;
  GridParams gp;
  gp.radial = 64;
  gp.angular = 8;
  gp.r_max = 4.0;
  gp.breaks = {1.0};
  auto coarse = GridSpec::build(gp);
  gp.radial = 128;
  auto fine = GridSpec::build(gp);
  auto val = [&p](const grid::GridPtr& g) {
    auto v = FieldVector::from_radial(
        g, [&p](double r) { return model::coupling_v_norm(r, p); });
    auto b = FieldVector::from_radial(
        g, [&p](double r) { return model::beta_norm(r, p); });
    return grid::inner(grid::cutoff_mask(Cutoff::finite(1.0), v),
                       grid::cutoff_mask(Cutoff::finite(1.0), b))
        .real();
  };
  CHECK(val(coarse) == doctest::Approx(val(fine)).epsilon(1e-11));
}

TEST_CASE("inner product algebra") {
  auto g = small_grid();
  auto f = FieldVector::from_function(g, [](const Vec2& k) {
    return complexd(k.x, 0.3 * k.y);
  });
  auto h = FieldVector::from_function(g, [](const Vec2& k) {
    return complexd(std::exp(-k.norm2()), 0.1);
  });
  const complexd fh = grid::inner(f, h);
  const complexd hf = grid::inner(h, f);
  CHECK(fh.real() == doctest::Approx(hf.real()).epsilon(1e-14));
  CHECK(fh.imag() == doctest::Approx(-hf.imag()).epsilon(1e-14));
  // antilinear in the first slot
  const complexd s(0.7, -1.2);
  const complexd lhs = grid::inner(f * s, h);
  const complexd want = std::conj(s) * fh;
  CHECK(lhs.real() == doctest::Approx(want.real()).epsilon(1e-13));
  CHECK(lhs.imag() == doctest::Approx(want.imag()).epsilon(1e-13));
  CHECK(grid::norm2(f) == doctest::Approx(grid::inner(f, f).real()).epsilon(1e-13));
}

TEST_CASE("phase and heat maps") {
  auto g = small_grid();
  auto f = FieldVector::from_radial(g, [](double r) { return std::exp(-r); });
  const Vec2 x(0.7, -1.1);
  auto ef = grid::apply_phase(x, f);
  // modulus preserved, inner products invariant under the joint phase
  CHECK((ef.amp().abs() - f.amp().abs()).abs().maxCoeff() < 1e-15);
  auto h = FieldVector::from_radial(g, [](double r) { return 1.0 / (1.0 + r); });
  auto eh = grid::apply_phase(x, h);
  const complexd before = grid::inner(f, h), after = grid::inner(ef, eh);
  CHECK(after.real() == doctest::Approx(before.real()).epsilon(1e-13));
  CHECK(std::abs(after.imag() - before.imag()) < 1e-13);
  // phase at the origin is the identity
  auto e0 = grid::apply_phase(Vec2(), f);
  CHECK((e0.amp() - f.amp()).abs().maxCoeff() == 0.0);

  auto hf = grid::apply_heat(0.5, f, 1.0);
  const double r0 = g->radius()[0];
  const double om0 = std::sqrt(r0 * r0 + 1.0);
  CHECK(hf.amp()[0].real() ==
        doctest::Approx(std::exp(-r0) * std::exp(-0.5 * om0)).epsilon(1e-14));
  auto h0 = grid::apply_heat(0.0, f, 1.0);
  CHECK((h0.amp() - f.amp()).abs().maxCoeff() == 0.0);
  // semigroup property of the heat factor
  auto h2 = grid::apply_heat(0.3, grid::apply_heat(0.2, f, 1.0), 1.0);
  auto h5 = grid::apply_heat(0.5, f, 1.0);
  CHECK((h2.amp() - h5.amp()).abs().maxCoeff() < 1e-15);
}

TEST_CASE("t-weighted norm") {
  auto g = small_grid();
  auto f = FieldVector::from_radial(g, [](double r) { return std::exp(-r); });
  const double direct =
      (g->weight() * (1.0 + 1.0 / (2.0 * grid::omega_nodes(*g, 1.0))) *
       f.amp().abs2())
          .sum();
  CHECK(grid::norm_t2(f, 2.0, 1.0) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(grid::norm_t2(f, 2.0, 1.0) > grid::norm2(f));
  CHECK_THROWS_AS(grid::norm_t2(f, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("cross-grid operations rejected") {
  auto g1 = small_grid();
  GridParams gp;
  gp.radial = 32;
  gp.angular = 8;
  gp.r_max = 4.0;
  auto g2 = GridSpec::build(gp);
  auto f1 = FieldVector::from_radial(g1, [](double) { return 1.0; });
  auto f2 = FieldVector::from_radial(g2, [](double) { return 1.0; });
  CHECK_THROWS_AS(grid::inner(f1, f2), std::invalid_argument);
  CHECK_THROWS_AS(f1 + f2, std::invalid_argument);
}

TEST_CASE("parameter validation") {
  GridParams gp;
  gp.angular = 7;
  CHECK_THROWS_AS(GridSpec::build(gp), std::invalid_argument);
  gp.angular = 8;
  gp.r_max = -1.0;
  CHECK_THROWS_AS(GridSpec::build(gp), std::invalid_argument);
  gp.r_max = 8.0;
  gp.breaks = {-2.0};
  CHECK_THROWS_AS(GridSpec::build(gp), std::invalid_argument);
}
