#pragma once

#include <optional>
#include <vector>

#include "rnm/grid.hpp"
#include "rnm/levy.hpp"
#include "rnm/types.hpp"

namespace rnm::action {

enum class ErenMode {
  quadrature,  // adaptive radial quadrature of the continuum integral
  grid_sum     // <v_L|beta_L> on this grid (discretized-model convention)
};

struct EvalOptions {
  std::vector<Cutoff> cutoffs = {Cutoff::infinite()};
  ErenMode eren = ErenMode::quadrature;
  bool want_defining = false;      // also accumulate the defining form
  bool want_fields = false;        // export U+ and U- at the horizon
  std::vector<double> sample_times;  // report u at these times as well
  bool want_event_samples = false;   // report u right after every jump
  double filter_eps = 0.0;         // drop jumps smaller than this first
};

// functionals of one path at one cutoff
struct PathFunctionals {
  Cutoff cutoff = Cutoff::infinite();
  double t = 0.0;  // horizon
  Vec2 x_t;        // terminal position
  // renormalized action, Ito form:
  //   sum_jumps <U+_{s_i}|e_{X_{s_i-}}(e_{dx_i}-1) beta_L>
  //   + int_0^t <U+_s|e_{X_s} psi beta_L> ds - <U+_t|e_{X_t} beta_L>
  complexd u;
  // defining form int_0^t <U+_s|e_{X_s} v_L> ds - t E^ren_L; NaN when the
  // cutoff is infinite under quadrature mode
  double u_defining = std::numeric_limits<double>::quiet_NaN();
  double e_ren = 0.0;  // subtraction constant actually used
  std::vector<complexd> u_at;  // aligned with EvalOptions::sample_times
  std::vector<double> event_times;   // jump times, when want_event_samples
  std::vector<complexd> u_event;     // post-jump u, aligned with event_times
  std::optional<grid::FieldVector> u_plus;   // int_0^t e^{-(t-s)omega} e_{X_s} v_L ds
  std::optional<grid::FieldVector> u_minus;  // int_0^t e^{-s omega} e_{X_s} v_L ds
};

// walks a piecewise-constant path once and produces the action functionals
// for every requested cutoff.  Segment updates are closed-form in time, so
// the only discretization is the momentum grid itself.  Cutoff restriction
// is banded: node contributions are accumulated per radial band and each
// cutoff reads a prefix of bands, which keeps a whole cutoff sweep at the
// cost of a single evaluation (and gives all cutoffs common random numbers).
class PathEvaluator {
 public:
  PathEvaluator(const ModelParams& params, grid::GridPtr grid,
                EvalOptions options);

  std::vector<PathFunctionals> evaluate(const levy::LevyPath& path) const;

  const grid::GridPtr& grid() const { return grid_; }
  const EvalOptions& options() const { return opts_; }
  const ModelParams& params() const { return params_; }
  double eren_value(size_t cutoff_index) const { return eren_[cutoff_index]; }

 private:
  ModelParams params_;
  grid::GridPtr grid_;
  EvalOptions opts_;
  // node tables
  Eigen::ArrayXd omega_, v_, bw_, vw_, v2w_, psibw_, vpsibw_;
  // band layout: band b covers nodes [band_start_[b], band_start_[b+1]);
  // cutoff i reads the first bands_for_cutoff_[i] bands
  std::vector<int> band_start_;
  std::vector<int> bands_for_cutoff_;
  std::vector<double> eren_;
};

}  // namespace rnm::action
