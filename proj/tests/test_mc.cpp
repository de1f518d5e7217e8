#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "rnm/fock.hpp"
#include "rnm/mc.hpp"
#include "rnm/model.hpp"
#include "rnm/quad.hpp"

using namespace rnm;

namespace {

grid::GridPtr small_grid(int radial, int angular, double r_max,
                         std::vector<double> breaks = {}) {
  grid::GridParams gp;
  gp.radial = radial;
  gp.angular = angular;
  gp.r_max = r_max;
  gp.breaks = std::move(breaks);
  return grid::GridSpec::build(gp);
}

// symbol correction from the discarded small jumps (|z| < eps)
double small_ball(double q, double eps, double m) {
  return quad::integrate(
             [q, m](double r) {
               if (r == 0.0) return q * q / 4.0;
               const double x = q * r;
               const double omj =
                   x < 0.01 ? (x * x / 4.0) * (1.0 - x * x / 16.0 +
                                               x * x * x * x / 576.0)
                            : 1.0 - std::cyl_bessel_j(0, x);
               return 2.0 * M_PI * r * omj * model::levy_density(r, m);
             },
             0.0, eps)
      .value;
}

}  // namespace

TEST_CASE("pairwise reduction") {
  const int n = 1000;
  std::vector<complexd> v(n);
  for (int i = 0; i < n; ++i) v[i] = complexd(i, 2.0 * i);
  const auto e = mc::reduce_column(v, 1, 0);
  CHECK(e.n == n);
  CHECK(e.mean.real() == doctest::Approx((n - 1) / 2.0).epsilon(1e-14));
  CHECK(e.mean.imag() == doctest::Approx(n - 1.0).epsilon(1e-14));
  // |v - mean|^2 has variance 5 * (n^2-1)/12 summed over both components
  const double var = 5.0 * (n * n - 1.0) / 12.0;
  CHECK(e.std_err ==
        doctest::Approx(std::sqrt(var * n / (n - 1.0) / n)).epsilon(1e-12));
  const auto d = mc::reduce_diff(v, 1, 0, 0);
  CHECK(d.mean == complexd(0.0, 0.0));
  CHECK(d.std_err == 0.0);
}

TEST_CASE("free vacuum estimator matches the truncated symbol") {
  // g = 0: the dressing is trivial and the estimator measures only the
  // characteristic function of the censored path
  ModelParams p{1.0, 1.0, 0.0};
  auto g = small_grid(4, 2, 1.0);
  action::EvalOptions opts;
  opts.cutoffs = {Cutoff::finite(1.0)};
  opts.eren = action::ErenMode::grid_sum;
  action::PathEvaluator ev(p, g, opts);

  mc::RunParams run;
  run.t = 1.2;
  run.eps = 0.05;
  run.n_paths = 20000;
  run.seed = 4242;
  mc::PairingSpec spec;
  spec.xi = Vec2(0.8, 0.3);
  const auto est = mc::fiber_semigroup(ev, spec, run)[0];

  const double q = spec.xi.norm();
  const double target =
      std::exp(-run.t * (model::psi_norm(q, p.m_p) - small_ball(q, run.eps, p.m_p)));
  CHECK(std::abs(est.mean - complexd(target, 0.0)) <= 4.0 * est.std_err);
  CHECK(est.std_err < 0.01);
}

TEST_CASE("free analytic continuation") {
  // still g = 0, but the fiber momentum moves into the strip; the target is
  // the analytically continued symbol, conjugated to match the estimator
  ModelParams p{1.0, 1.0, 0.0};
  auto g = small_grid(4, 2, 1.0);
  action::EvalOptions opts;
  opts.cutoffs = {Cutoff::finite(1.0)};
  opts.eren = action::ErenMode::grid_sum;
  action::PathEvaluator ev(p, g, opts);

  mc::RunParams run;
  run.t = 1.0;
  run.eps = 0.01;
  run.n_paths = 30000;
  run.seed = 515151;
  const auto est =
      mc::analytic_fiber(ev, Vec2(0.3, 0.2), Vec2(0.4, 0.0), nullptr, nullptr,
                         run)[0];

  const complexd sym = model::analytic_symbol(Vec2(0.3, 0.2), Vec2(0.4, 0.0),
                                              p.m_p);
  const complexd target = std::exp(-run.t * std::conj(sym));
  CHECK(std::abs(est.mean - target) <= 4.0 * est.std_err + 1e-5);
  // outside the strip the estimator must refuse
  mc::PairingSpec bad;
  bad.xi = Vec2(0.3, 0.2);
  bad.analytic = true;
  bad.eta = Vec2(1.0, 0.0);
  CHECK_THROWS_AS(mc::fiber_semigroup(ev, bad, run), std::invalid_argument);
}

TEST_CASE("coherent pairing against the truncated basis") {
  // asymmetric in and out labels, both genuinely complex, so a conjugation
  // slip in either slot would show
  ModelParams p{1.0, 1.0, 0.25};
  auto g = small_grid(4, 2, 1.0);
  auto f_in = [](const Vec2& k) {
    return complexd(0.3, 0.2) * std::exp(-k.norm2());
  };
  auto g_out = [](const Vec2& k) {
    return complexd(0.2 * std::exp(-0.5 * k.norm2()), 0.1 * k.x);
  };
  mc::RunParams run;
  run.t = 0.75;
  run.eps = 5e-3;
  run.n_paths = 20000;
  run.seed = 99;
  const auto cmp = mc::mc_vs_oracle(p, g, Cutoff::finite(1.0), Vec2(0.4, -0.2),
                                    f_in, g_out, 4, run);
  CHECK(cmp.modes == 8);
  CHECK(cmp.dim == 495);
  CHECK(cmp.gap <= 4.0 * cmp.mc.std_err + 3e-4);
  CHECK(std::abs(cmp.oracle.imag()) > 1e-3);

  // swapping the roles conjugates the element: the truncated operator is a
  // real symmetric matrix, so this holds exactly on the oracle side
  const auto swp = mc::mc_vs_oracle(p, g, Cutoff::finite(1.0), Vec2(0.4, -0.2),
                                    g_out, f_in, 4, run);
  CHECK(std::abs(swp.oracle - std::conj(cmp.oracle)) < 1e-12);
  CHECK(swp.gap <= 4.0 * swp.mc.std_err + 3e-4);
}

TEST_CASE("cutoff sweep with common paths") {
  ModelParams p{1.0, 1.0, 0.4};
  auto g = small_grid(24, 8, 4.0, {1.0, 2.0});
  action::EvalOptions opts;
  opts.cutoffs = {Cutoff::finite(1.0), Cutoff::finite(2.0), Cutoff::finite(4.0)};
  action::PathEvaluator ev(p, g, opts);

  mc::RunParams run;
  run.t = 1.0;
  run.eps = 1e-2;
  run.n_paths = 10000;
  run.seed = 321;
  mc::PairingSpec spec;  // vacuum
  const auto sw = mc::lambda_sweep(ev, spec, run);
  REQUIRE(sw.value.size() == 3);
  REQUIRE(sw.diff.size() == 2);
  for (int i = 0; i < 2; ++i) {
    // the paired difference agrees with the difference of the means up to
    // reassociation roundoff, and common paths make it far tighter
    const complexd gap =
        sw.diff[i].mean - (sw.value[i + 1].mean - sw.value[i].mean);
    CHECK(std::abs(gap) < 1e-12);
    CHECK(sw.diff[i].std_err < sw.value[i + 1].std_err);
  }
  // tail decay: consecutive increments shrink as the cutoff doubles
  CHECK(std::abs(sw.diff[1].mean) < std::abs(sw.diff[0].mean));
}

TEST_CASE("factorization in time") {
  ModelParams p{1.0, 1.0, 0.3};
  auto g = small_grid(4, 2, 1.0);
  action::EvalOptions opts;
  opts.cutoffs = {Cutoff::finite(1.0)};
  opts.eren = action::ErenMode::grid_sum;
  opts.want_fields = true;
  action::PathEvaluator ev(p, g, opts);
  const auto f = grid::FieldVector::from_function(g, [](const Vec2& k) {
    return complexd(0.3 * std::exp(-k.norm2()), 0.1);
  });
  const auto h = grid::FieldVector::from_function(g, [](const Vec2& k) {
    return complexd(0.2, -0.1 * k.y) * std::exp(-0.5 * k.norm2());
  });
  mc::RunParams run;
  run.t = 1.0;
  run.eps = 2e-2;
  run.n_paths = 300;
  run.seed = 2024;
  const auto chk = mc::semigroup_check(ev, Vec2(0.3, 0.1), f, h, run, 2);
  CHECK(chk.flow_median <= 1e-10);
  CHECK(chk.flow_p99 <= 1e-8);
  CHECK(chk.oracle_dim == 45);
  CHECK(chk.oracle_gap <= 1e-8);
}

TEST_CASE("running moment of the dressing") {
  ModelParams p{1.0, 1.0, 0.5};
  auto g = small_grid(16, 8, 2.0, {1.0});

  auto build = [&](std::vector<double> times, bool events) {
    action::EvalOptions opts;
    opts.cutoffs = {Cutoff::finite(2.0)};
    opts.sample_times = std::move(times);
    opts.want_event_samples = events;
    return action::PathEvaluator(p, g, opts);
  };
  mc::RunParams run;
  run.t = 1.0;
  run.eps = 2e-2;
  run.n_paths = 4000;
  run.seed = 777;

  action::PathEvaluator coarse = build({0.5}, false);
  action::PathEvaluator fine = build({0.25, 0.5, 0.75}, true);
  const auto lo = mc::moment_sup(coarse, run)[0];
  const auto hi = mc::moment_sup(fine, run)[0];
  CHECK(lo.mean.real() >= 1.0);
  // refining the sup grid can only push the pathwise sup (and its mean) up
  CHECK(hi.mean.real() >= lo.mean.real());
  CHECK(hi.mean.real() < 10.0);

  // free case: u vanishes identically and the sup is exactly one
  ModelParams free{1.0, 1.0, 0.0};
  action::EvalOptions fopts;
  fopts.cutoffs = {Cutoff::finite(2.0)};
  fopts.sample_times = {0.5};
  action::PathEvaluator fev(free, g, fopts);
  const auto unit = mc::moment_sup(fev, run)[0];
  CHECK(unit.mean.real() == 1.0);
  CHECK(unit.std_err == 0.0);
}

TEST_CASE("translated pairing with labels") {
  auto g = small_grid(8, 4, 1.0);
  action::EvalOptions opts;
  opts.cutoffs = {Cutoff::finite(1.0)};
  opts.eren = action::ErenMode::grid_sum;
  opts.want_fields = true;
  const auto fz = grid::FieldVector::from_function(g, [](const Vec2& k) {
    return complexd(0.25, 0.15) * std::exp(-k.norm2());
  });
  const auto gz = grid::FieldVector::from_function(g, [](const Vec2& k) {
    return complexd(0.15 * std::exp(-0.5 * k.norm2()), -0.1 * k.y);
  });
  mc::FullPairingSpec fp;
  fp.rho_in = {Vec2(0.3, -0.2), 1.0};
  fp.rho_out = {Vec2(-0.1, 0.4), 1.2};
  fp.f_in = &fz;
  fp.g_out = &gz;
  fp.x_quad = 24;

  SUBCASE("decoupled limit factorizes") {
    // g = 0: position and field parts evolve independently, so the pairing
    // is (state overlap under the censored symbol) x (heat pairing of the
    // labels), both computable by quadrature
    ModelParams p{1.0, 1.0, 0.0};
    action::PathEvaluator ev(p, g, opts);
    mc::RunParams run;
    run.t = 0.9;
    run.eps = 2e-2;
    run.n_paths = 4000;
    run.seed = 77;
    const auto est = mc::full_pairing(ev, fp, run);

    const double s2sum = 1.0 * 1.0 + 1.2 * 1.2;
    const double qn = 1.0 * 1.2 / M_PI;
    const Vec2 dc(fp.rho_out.center.x - fp.rho_in.center.x,
                  fp.rho_out.center.y - fp.rho_in.center.y);
    const int nq = 40;
    std::vector<double> xn(nq), xw(nq);
    quad::gauss_legendre(nq, xn.data(), xw.data());
    const double L = 6.0 / std::sqrt(s2sum);
    complexd spatial = 0.0;
    for (int i = 0; i < nq; ++i) {
      for (int j = 0; j < nq; ++j) {
        const double qx = L * xn[i], qy = L * xn[j];
        const double q = std::hypot(qx, qy);
        const double sym =
            model::psi_norm(q, p.m_p) - small_ball(q, run.eps, p.m_p);
        const double ph = qx * dc.x + qy * dc.y;
        spatial += (L * xw[i]) * (L * xw[j]) * qn *
                   std::exp(-0.5 * s2sum * q * q - run.t * sym) *
                   complexd(std::cos(ph), std::sin(ph));
      }
    }
    const complexd target =
        spatial * std::exp(grid::inner(gz, grid::apply_heat(run.t, fz, p.m_b)));
    CHECK(std::abs(est.mean - target) <= 4.0 * est.std_err + 2e-4);
    CHECK(std::abs(target) > 0.02);
  }

  SUBCASE("integrand matches the rank-one dressing action") {
    // the quadrature integrand at a fixed x must equal
    // <eps(f)| W(x) eps(g)> assembled from the coherent representation
    ModelParams p{1.0, 1.0, 0.4};
    action::PathEvaluator ev(p, g, opts);
    const auto path = levy::sample_path(0.8, 1e-2, p.m_p, 555, 3);
    const auto F = ev.evaluate(path)[0];
    const Vec2 x(0.7, -0.3);

    const int keep = g->nodes_below(opts.cutoffs[0]);
    complexd sm = 0.0, sp = 0.0;
    for (int k = 0; k < keep; ++k) {
      const double w = g->weight()[k];
      const double ph = g->kx()[k] * x.x + g->ky()[k] * x.y;
      const complexd ex(std::cos(ph), std::sin(ph));
      sm += w * std::conj(F.u_minus->amp()[k]) * ex * gz.amp()[k];
      sp += w * std::conj(fz.amp()[k]) * std::conj(ex) * F.u_plus->amp()[k];
    }
    const complexd hfg = grid::inner(fz, grid::apply_heat(0.8, gz, p.m_b));
    const complexd direct = std::exp(F.u + hfg - sm - sp);

    const auto rep = fock::w_on_coherent(F, x, gz, p.m_b);
    const complexd via_rep =
        std::exp(rep.log_scale + grid::inner(fz, rep.label));
    CHECK(std::abs(direct - via_rep) <= 1e-12 * std::abs(direct));
  }
}

TEST_CASE("position route equals fiber route") {
  auto g = small_grid(8, 4, 1.0);
  action::EvalOptions opts;
  opts.cutoffs = {Cutoff::finite(1.0)};
  opts.eren = action::ErenMode::grid_sum;

  mc::FullPairingSpec fp;
  fp.rho_in = {Vec2(0.3, -0.2), 1.0};
  fp.rho_out = {Vec2(-0.1, 0.4), 1.2};

  SUBCASE("free case is pathwise quadrature-exact") {
    ModelParams p{1.0, 1.0, 0.0};
    action::PathEvaluator ev(p, g, opts);
    mc::RunParams run;
    run.t = 1.0;
    run.eps = 5e-2;
    run.n_paths = 200;
    run.seed = 31;
    const auto r = mc::fiber_vs_full(ev, fp, run);
    // with no field the two routes integrate the same Gaussian overlap
    CHECK(std::abs(r.diff.mean) < 1e-8);
    CHECK(r.diff.std_err < 1e-8);
    CHECK(std::abs(r.full.mean) > 0.05);
  }

  SUBCASE("interacting, vacuum field labels") {
    ModelParams p{1.0, 1.0, 0.3};
    action::PathEvaluator ev(p, g, opts);
    mc::RunParams run;
    run.t = 1.0;
    run.eps = 2e-2;
    run.n_paths = 2000;
    run.seed = 32;
    const auto r = mc::fiber_vs_full(ev, fp, run);
    CHECK(std::abs(r.diff.mean) <= 4.0 * r.diff.std_err + 1e-6);
    // both routes see the same paths, so the difference is much quieter
    // than either estimate
    CHECK(r.diff.std_err < 0.5 * r.full.std_err);
  }

  SUBCASE("coherent labels are rejected") {
    // the fiber transform twists each fiber by a position-dependent phase
    // on the field, which is invisible on the vacuum but mixes coherent
    // labels across fibers; the naive product comparison would be wrong
    ModelParams p{1.0, 1.0, 0.3};
    action::EvalOptions wopts = opts;
    wopts.want_fields = true;
    action::PathEvaluator ev(p, g, wopts);
    const auto fz = grid::FieldVector::from_function(g, [](const Vec2& k) {
      return complexd(0.25 * std::exp(-k.norm2()), 0.0);
    });
    mc::FullPairingSpec fpc = fp;
    fpc.f_in = &fz;
    mc::RunParams run;
    run.t = 0.8;
    run.eps = 2e-2;
    run.n_paths = 10;
    run.seed = 33;
    CHECK_THROWS_AS(mc::fiber_vs_full(ev, fpc, run), std::invalid_argument);
  }
}

TEST_CASE("estimates do not depend on the thread split") {
  ModelParams p{1.0, 1.0, 0.35};
  auto g = small_grid(8, 4, 1.0);
  action::EvalOptions opts;
  opts.cutoffs = {Cutoff::finite(1.0)};
  action::PathEvaluator ev(p, g, opts);
  mc::PairingSpec spec;
  spec.xi = Vec2(0.2, 0.1);

  auto with_threads = [&](int nt) {
    mc::RunParams run;
    run.t = 1.0;
    run.eps = 1e-2;
    run.n_paths = 3000;
    run.seed = 500;
    run.threads = nt;
    return mc::fiber_semigroup(ev, spec, run)[0];
  };
  const auto a = with_threads(1);
  const auto b = with_threads(3);
  const auto c = with_threads(7);
  // bitwise: reduction order is fixed and streams are keyed by path index
  CHECK(a.mean.real() == b.mean.real());
  CHECK(a.mean.imag() == b.mean.imag());
  CHECK(a.std_err == b.std_err);
  CHECK(a.mean.real() == c.mean.real());
  CHECK(a.std_err == c.std_err);

  mc::RunParams other;
  other.t = 1.0;
  other.eps = 1e-2;
  other.n_paths = 3000;
  other.seed = 501;
  const auto d = mc::fiber_semigroup(ev, spec, other)[0];
  CHECK(d.mean.real() != a.mean.real());
}
