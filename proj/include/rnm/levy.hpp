#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rnm/rng.hpp"
#include "rnm/types.hpp"

namespace rnm::levy {

struct PathEvent {
  double time = 0.0;  // in (0, horizon]
  Vec2 jump;          // |jump| >= eps
};

// piecewise-constant cadlag path: starts at 0, jumps at the listed events.
// eps is the small-jump truncation radius used when sampling.
struct LevyPath {
  double horizon = 0.0;
  double eps = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;
  std::vector<PathEvent> events;  // sorted by time

  Vec2 position(double s) const;  // sum of jumps with time <= s
  Vec2 terminal() const { return position(horizon); }

  // restriction to [0, s] (events with time <= s, horizon s)
  LevyPath head(double s) const;
  // shifted remainder r -> X_{s+r} - X_s (events after s, times minus s)
  LevyPath tail_shifted(double s) const;
  // drop events with |jump| < eps_coarse; exact coupling between truncation
  // levels (thinning), used to measure the eps bias with shared randomness
  LevyPath filtered(double eps_coarse) const;
};

// subordinator S_t with Laplace transform E e^{-u S_t} = e^{-t(sqrt(u+m^2)-m)}:
// inverse Gaussian (mean t/2m, shape t^2/2) for m > 0, one-sided 1/2-stable
// t^2/(2 Z^2) for m = 0
double sample_subordinator(double t, double m_p, Rng& rng);

// exact increment X_t = sqrt(2 S_t) (N1, N2); E e^{i xi.X_t} = e^{-t psi(xi)}
Vec2 sample_increment(double t, double m_p, Rng& rng);

// compound-Poisson path of jumps with |z| >= eps: Poisson clock at rate
// jump_rate(eps), radius by inverting the restricted survival function,
// uniform angle.  The stream is keyed by (master_seed, path_index) only.
LevyPath sample_path(double horizon, double eps, double m_p,
                     std::uint64_t master_seed, std::uint64_t path_index);

struct MomentCheck {
  double mean = 0.0;
  double target = 0.0;
  double std_err = 0.0;
  bool pass(double n_sigma = 4.0) const {
    return std::abs(mean - target) <= n_sigma * std_err;
  }
};

// E[e^{-u S_1}] against the closed-form Laplace transform
MomentCheck subordinator_check(double u, double m_p, int n_samples,
                               std::uint64_t seed);

// CSV serialization: metadata line, column header, one row per event
void dump_csv(std::ostream& os, const LevyPath& path);
LevyPath load_csv(std::istream& is);

}  // namespace rnm::levy
