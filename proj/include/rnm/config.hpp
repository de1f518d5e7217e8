#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rnm/action.hpp"
#include "rnm/grid.hpp"
#include "rnm/types.hpp"

namespace rnm::config {

// schema violations carry the offending key so the message points at the
// config line, not at internals
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// one flat key = value file drives every experiment; every key has a
// default, so an empty file (or none at all) is a valid config.  Worker
// count is deliberately absent: results never depend on it, so it lives in
// a flag or environment variable and stays out of the hash.
struct RunConfig {
  // model: m_p, m_b, g, lambda ("inf" allowed)
  ModelParams model{1.0, 1.0, 0.3};
  Cutoff lambda = Cutoff::finite(1.0);

  // grid.radial, grid.angular, grid.r_max, grid.breaks, grid.tol
  grid::GridParams grid{32, 16, 8.0, {}};
  double grid_tol = 1e-4;  // declared relative quadrature tolerance

  // levy.eps
  double eps = 1e-3;

  // action.tol_id: p99 budget for the two action forms agreeing pathwise
  double tol_id = 1e-3;

  // mc.n_paths, mc.seed, mc.t (comma list), mc.xi (x,y pairs split by ';'),
  // mc.lambdas (comma list, "inf" allowed; cutoff ladder for sweeps)
  std::uint64_t n_paths = 10000;
  std::uint64_t seed = 1;
  std::vector<double> times = {1.0};
  std::vector<Vec2> xis = {Vec2()};
  std::vector<Cutoff> lambdas;  // empty = just `lambda`

  // oracle.n_max, oracle.max_dim, oracle.eren_mode (modesum | quadrature),
  // oracle.scan_lambdas, oracle.scan_radial_per_octave, oracle.scan_angular
  int n_max = 2;
  int max_dim = 5000;
  action::ErenMode eren = action::ErenMode::grid_sum;
  std::vector<double> scan_lambdas = {2.0, 4.0, 8.0};
  int scan_radial_per_octave = 4;
  int scan_angular = 4;

  // compare.budget: declared truncation allowance on top of 3 sigma
  double compare_budget = 2e-4;

  // experiment, output_dir
  std::string experiment = "default";
  std::string output_dir = "out";

  void validate() const;

  // every numerics-affecting key in a fixed order with round-trip number
  // formatting; two configs produce identical results iff their canonical
  // forms are byte-equal (experiment and output_dir are excluded)
  std::string canonical() const;
  std::string hash() const;  // fnv1a64 of canonical(), 16 hex digits

  std::vector<Cutoff> cutoff_ladder() const {
    return lambdas.empty() ? std::vector<Cutoff>{lambda} : lambdas;
  }
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a64(std::string_view s);
std::string format_double(double v);  // shortest round-trip decimal

}  // namespace rnm::config
