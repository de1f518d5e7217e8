// python surface: thin wrappers over the main engine operations.  Numeric
// defaults mirror the config-file defaults; cutoffs are plain floats with
// inf meaning the whole grid.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "rnm/action.hpp"
#include "rnm/config.hpp"
#include "rnm/grid.hpp"
#include "rnm/levy.hpp"
#include "rnm/mc.hpp"
#include "rnm/model.hpp"
#include "rnm/oracle.hpp"

namespace py = pybind11;
using namespace rnm;
using namespace pybind11::literals;

namespace {

Cutoff as_cutoff(double lam) {
  if (std::isinf(lam)) return Cutoff::infinite();
  return Cutoff::finite(lam);
}

// finite cutoff radii inside the ball become panel breaks so every cutoff
// boundary is resolved exactly (same convention as the cli runner)
grid::GridPtr build_grid(int radial, int angular, double r_max,
                         std::vector<double> breaks,
                         const std::vector<double>& lambdas) {
  for (double l : lambdas) {
    if (std::isinf(l)) continue;
    if (l > r_max)
      throw std::invalid_argument("cutoff radius exceeds grid r_max");
    if (l < r_max) breaks.push_back(l);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  grid::GridParams gp{radial, angular, r_max, std::move(breaks)};
  return grid::GridSpec::build(gp);
}

action::PathEvaluator make_evaluator(const ModelParams& p, grid::GridPtr g,
                                     const std::vector<double>& lambdas) {
  action::EvalOptions opts;
  opts.cutoffs.clear();
  for (double l : lambdas) opts.cutoffs.push_back(as_cutoff(l));
  opts.eren = action::ErenMode::grid_sum;
  return action::PathEvaluator(p, std::move(g), opts);
}

mc::RunParams make_run(double t, double eps, std::uint64_t n_paths,
                       std::uint64_t seed, int threads) {
  mc::RunParams run;
  run.t = t;
  run.eps = eps;
  run.n_paths = n_paths;
  run.seed = seed;
  run.threads = threads;
  run.validate();
  return run;
}

}  // namespace

PYBIND11_MODULE(rnm, m) {
  m.doc() = "Monte Carlo engine for a renormalized particle-field semigroup";

  py::class_<mc::Estimate>(m, "Estimate")
      .def_readonly("mean", &mc::Estimate::mean)
      .def_readonly("std_err", &mc::Estimate::std_err)
      .def_readonly("n", &mc::Estimate::n)
      .def("__repr__", [](const mc::Estimate& e) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "Estimate(%g%+gj, se=%g, n=%llu)",
                      e.mean.real(), e.mean.imag(), e.std_err,
                      static_cast<unsigned long long>(e.n));
        return std::string(buf);
      });

  m.def(
      "psi", [](double xi, double m_p) { return model::psi_norm(xi, m_p); },
      "xi"_a, "m_p"_a = 1.0,
      "particle dispersion sqrt(xi^2 + m_p^2) - m_p");
  m.def(
      "omega", [](double k, double m_b) { return model::omega_norm(k, m_b); },
      "k"_a, "m_b"_a = 1.0, "boson dispersion sqrt(k^2 + m_b^2)");
  m.def(
      "e_ren",
      [](double m_p, double m_b, double g, double lam) {
        return model::e_ren(ModelParams{m_p, m_b, g}, as_cutoff(lam));
      },
      "m_p"_a = 1.0, "m_b"_a = 1.0, "g"_a = 0.3, "lam"_a = 1.0,
      "renormalization constant at a finite cutoff (quadrature)");
  m.def("e_ren_closed", &model::e_ren_closed_equal_mass, "m"_a, "g"_a, "lam"_a,
        "equal-mass closed form pi g^2 log((2 sqrt(lam^2+m^2) - m)/m)");

  m.def(
      "sample_path",
      [](double horizon, double eps, double m_p, std::uint64_t seed,
         std::uint64_t index) {
        const auto p = levy::sample_path(horizon, eps, m_p, seed, index);
        py::list events;
        for (const auto& e : p.events)
          events.append(py::make_tuple(e.time,
                                       py::make_tuple(e.jump.x, e.jump.y)));
        const Vec2 xt = p.terminal();
        return py::dict("horizon"_a = p.horizon, "eps"_a = p.eps,
                        "terminal"_a = py::make_tuple(xt.x, xt.y),
                        "events"_a = events);
      },
      "horizon"_a = 1.0, "eps"_a = 1e-3, "m_p"_a = 1.0, "seed"_a = 1,
      "index"_a = 0,
      "censored jump path of the (seed, index) stream; pure function of its "
      "arguments");

  m.def(
      "semigroup",
      [](double m_p, double m_b, double g, std::vector<double> lambdas,
         std::pair<double, double> xi, double t, std::uint64_t n_paths,
         std::uint64_t seed, double eps, int radial, int angular, double r_max,
         std::vector<double> breaks, int threads) {
        ModelParams p{m_p, m_b, g};
        auto grid = build_grid(radial, angular, r_max, breaks, lambdas);
        auto ev = make_evaluator(p, grid, lambdas);
        mc::PairingSpec spec;
        spec.xi = Vec2(xi.first, xi.second);
        return mc::fiber_semigroup(ev, spec,
                                   make_run(t, eps, n_paths, seed, threads));
      },
      "m_p"_a = 1.0, "m_b"_a = 1.0, "g"_a = 0.3,
      "lambdas"_a = std::vector<double>{1.0},
      "xi"_a = std::make_pair(0.0, 0.0), "t"_a = 1.0, "n_paths"_a = 10000,
      "seed"_a = 1, "eps"_a = 1e-3, "radial"_a = 32, "angular"_a = 16,
      "r_max"_a = 8.0, "breaks"_a = std::vector<double>{}, "threads"_a = 1,
      "vacuum pairing of the fiber semigroup at total momentum xi, one "
      "estimate per cutoff on common paths");

  m.def(
      "cutoff_sweep",
      [](double m_p, double m_b, double g, std::vector<double> lambdas,
         std::pair<double, double> xi, double t, std::uint64_t n_paths,
         std::uint64_t seed, double eps, int radial, int angular, double r_max,
         std::vector<double> breaks, int threads) {
        ModelParams p{m_p, m_b, g};
        auto grid = build_grid(radial, angular, r_max, breaks, lambdas);
        auto ev = make_evaluator(p, grid, lambdas);
        mc::PairingSpec spec;
        spec.xi = Vec2(xi.first, xi.second);
        auto sw = mc::lambda_sweep(ev, spec,
                                   make_run(t, eps, n_paths, seed, threads));
        return py::dict("values"_a = sw.value, "diffs"_a = sw.diff);
      },
      "m_p"_a = 1.0, "m_b"_a = 1.0, "g"_a = 0.3,
      "lambdas"_a = std::vector<double>{1.0, 2.0, 4.0},
      "xi"_a = std::make_pair(0.0, 0.0), "t"_a = 1.0, "n_paths"_a = 10000,
      "seed"_a = 1, "eps"_a = 1e-3, "radial"_a = 32, "angular"_a = 16,
      "r_max"_a = 8.0, "breaks"_a = std::vector<double>{}, "threads"_a = 1,
      "cutoff ladder on common paths plus consecutive differences");

  m.def(
      "ground_energy",
      [](double m_p, double m_b, double g, double lam,
         std::pair<double, double> xi, int n_max, int radial, int angular,
         int max_dim) {
        if (std::isinf(lam))
          throw std::invalid_argument("ground_energy needs a finite cutoff");
        ModelParams p{m_p, m_b, g};
        auto grid = build_grid(radial, angular, lam, {}, {lam});
        auto space = oracle::make_space(*grid, Cutoff::finite(lam), n_max,
                                        max_dim);
        auto op = oracle::build_fiber(space, p, Vec2(xi.first, xi.second),
                                      action::ErenMode::grid_sum);
        return py::dict("e0"_a = op.ground_energy(), "e_ren"_a = op.e_ren,
                        "dim"_a = space.dim(), "modes"_a = space.modes());
      },
      "m_p"_a = 1.0, "m_b"_a = 1.0, "g"_a = 0.3, "lam"_a = 1.0,
      "xi"_a = std::make_pair(0.0, 0.0), "n_max"_a = 2, "radial"_a = 4,
      "angular"_a = 4, "max_dim"_a = 5000,
      "subtracted fiber ground energy on the truncated basis");

  m.def(
      "compare",
      [](double m_p, double m_b, double g, double lam,
         std::pair<double, double> xi, double t, std::uint64_t n_paths,
         std::uint64_t seed, double eps, int n_max, int radial, int angular,
         int max_dim, int threads) {
        if (std::isinf(lam))
          throw std::invalid_argument("compare needs a finite cutoff");
        ModelParams p{m_p, m_b, g};
        auto grid = build_grid(radial, angular, lam, {}, {lam});
        auto cmp = mc::mc_vs_oracle(p, grid, Cutoff::finite(lam),
                                    Vec2(xi.first, xi.second), {}, {}, n_max,
                                    make_run(t, eps, n_paths, seed, threads),
                                    max_dim);
        return py::dict("mc"_a = cmp.mc, "oracle"_a = cmp.oracle,
                        "gap"_a = cmp.gap, "dim"_a = cmp.dim,
                        "modes"_a = cmp.modes);
      },
      "m_p"_a = 1.0, "m_b"_a = 1.0, "g"_a = 0.3, "lam"_a = 1.0,
      "xi"_a = std::make_pair(0.0, 0.0), "t"_a = 1.0, "n_paths"_a = 10000,
      "seed"_a = 1, "eps"_a = 5e-3, "n_max"_a = 2, "radial"_a = 4,
      "angular"_a = 4, "max_dim"_a = 5000, "threads"_a = 1,
      "vacuum pairing: path estimate vs exact diagonalization of the same "
      "discretized model");

  m.def(
      "canonical_config",
      [](const std::string& text) {
        return config::parse_config(text).canonical();
      },
      "text"_a, "canonical key = value form of a config (defaults filled in)");
  m.def(
      "config_hash",
      [](const std::string& text) { return config::parse_config(text).hash(); },
      "text"_a, "16-hex-digit identity of the numerics-affecting keys");
}
