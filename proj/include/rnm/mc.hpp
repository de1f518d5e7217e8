#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rnm/action.hpp"
#include "rnm/grid.hpp"
#include "rnm/levy.hpp"
#include "rnm/oracle.hpp"

namespace rnm::mc {

struct RunParams {
  double t = 1.0;             // semigroup time
  double eps = 1e-3;          // small-jump truncation of the sampled paths
  std::uint64_t n_paths = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
  void validate() const;
};

struct Estimate {
  complexd mean;
  double std_err = 0.0;  // sqrt(E|v - mean|^2 / n)
  std::uint64_t n = 0;
};

// mean and standard error of column j of a row-major n x cols table, with a
// fixed pairwise summation order: the result is bitwise independent of how
// the rows were produced (thread count, scheduling)
Estimate reduce_column(const std::vector<complexd>& values, int cols, int j);
// same for the difference column j1 - j0
Estimate reduce_diff(const std::vector<complexd>& values, int cols, int j1,
                     int j0);

// samples path i from the (seed, i) stream and calls fn(i, path, row) for
// every i, split across threads; rows land at out[i*cols .. i*cols+cols)
void run_paths(const RunParams& run, double m_p, int cols,
               const std::function<void(std::uint64_t, const levy::LevyPath&,
                                        complexd*)>& fn,
               std::vector<complexd>& out);

// matrix element <eps(g_out)| T_t(xi) eps(f_in)> of the fiber semigroup,
// one estimate per evaluator cutoff, all cutoffs on common paths.  Null
// labels mean the vacuum; with both null the evaluator does not need
// exported fields.  analytic = true continues the fiber momentum to
// xi + i eta inside the strip |eta| < m_p.
struct PairingSpec {
  Vec2 xi;
  const grid::FieldVector* f_in = nullptr;
  const grid::FieldVector* g_out = nullptr;
  bool analytic = false;
  Vec2 eta;
};

std::vector<Estimate> fiber_semigroup(const action::PathEvaluator& ev,
                                      const PairingSpec& spec,
                                      const RunParams& run);

// continuation to complex total momentum zeta = xi + i eta
std::vector<Estimate> analytic_fiber(const action::PathEvaluator& ev,
                                     const Vec2& xi, const Vec2& eta,
                                     const grid::FieldVector* f_in,
                                     const grid::FieldVector* g_out,
                                     const RunParams& run);

// fiber_semigroup plus the pairwise differences between consecutive
// cutoffs, estimated path-by-path (common random numbers), for
// Cauchy-in-cutoff tests
struct SweepResult {
  std::vector<Estimate> value;
  std::vector<Estimate> diff;  // diff[i] estimates value[i+1] - value[i]
};

SweepResult lambda_sweep(const action::PathEvaluator& ev,
                         const PairingSpec& spec, const RunParams& run);

// path estimate against the truncated-basis value on the same modes: both
// sides describe the identical discretized model (subtraction constant is
// the grid sum), so the gap is MC noise plus boson-number truncation plus
// the small-jump bias
struct OracleCompare {
  Estimate mc;
  complexd oracle;
  double gap = 0.0;
  int dim = 0;
  int modes = 0;
};

OracleCompare mc_vs_oracle(const ModelParams& p, grid::GridPtr grid,
                           const Cutoff& cutoff, const Vec2& xi,
                           const std::function<complexd(const Vec2&)>& f_in,
                           const std::function<complexd(const Vec2&)>& g_out,
                           int n_max, const RunParams& run, int max_dim = 5000);

// factorization T_t = T_s T_{t-s} checked two ways: the exact rank-one
// flow of the dressing on sampled paths (split points spread over (0,t))
// and the truncated-basis semigroup product on the evaluator's first cutoff
struct SemigroupCheck {
  double flow_median = 0.0;
  double flow_p99 = 0.0;
  double oracle_gap = 0.0;
  int oracle_dim = 0;
};

SemigroupCheck semigroup_check(const action::PathEvaluator& ev, const Vec2& xi,
                               const grid::FieldVector& f,
                               const grid::FieldVector& g,
                               const RunParams& run, int oracle_n_max,
                               int oracle_max_dim = 5000);

// E[sup_s exp(2 Re u_s)] per cutoff, the second moment of the dressing
// scalar along the path; the sup runs over s = 0, the evaluator's sample
// times, the post-jump values and the horizon
std::vector<Estimate> moment_sup(const action::PathEvaluator& ev,
                                 const RunParams& run);

// normalized position Gaussian (pi sigma^2)^{-1/2} exp(-|x-c|^2 / 2 sigma^2)
struct GaussianState {
  Vec2 center;
  double sigma = 1.0;
};

struct FullPairingSpec {
  GaussianState rho_in, rho_out;
  const grid::FieldVector* f_in = nullptr;   // null = vacuum
  const grid::FieldVector* g_out = nullptr;  // null = vacuum
  int x_quad = 32;      // tensor Gauss-Legendre nodes per axis
  double x_pad = 6.0;   // box half-width in units of the product width
  int xi_quad = 32;
  double xi_pad = 6.0;
};

// <rho_out x eps(g_out)| exp(-t H_L) rho_in x eps(f_in)> by position-space
// quadrature of the translated dressing, first evaluator cutoff
Estimate full_pairing(const action::PathEvaluator& ev,
                      const FullPairingSpec& spec, const RunParams& run);

// vacuum field sector only: the same matrix element assembled through the
// fiber decomposition (the position-dependent gauge twist of the fiber
// transform acts trivially on the vacuum; coherent sectors would need a
// double position quadrature and are rejected).  Both routes share paths,
// so diff is pure quadrature error.
struct FiberFullGap {
  Estimate full;
  Estimate fibered;
  Estimate diff;  // full - fibered, path by path
};

FiberFullGap fiber_vs_full(const action::PathEvaluator& ev,
                           const FullPairingSpec& spec, const RunParams& run);

}  // namespace rnm::mc
