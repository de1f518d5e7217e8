#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "rnm/action.hpp"
#include "rnm/grid.hpp"
#include "rnm/types.hpp"

namespace rnm::oracle {

// bosonic Fock space over finitely many discrete modes, truncated at total
// occupation n_max.  Modes are quadrature nodes (k_j, w_j); the discrete
// model they induce is exactly the one the path evaluator integrates when
// run on the same grid with grid_sum renormalization.
struct TruncatedFock {
  std::vector<Vec2> mode_k;
  std::vector<double> mode_w;
  Cutoff cutoff = Cutoff::infinite();
  int n_max = 0;
  std::vector<std::vector<std::uint8_t>> basis;  // occupation vectors
  std::map<std::vector<std::uint8_t>, int> index;

  int dim() const { return static_cast<int>(basis.size()); }
  int modes() const { return static_cast<int>(mode_k.size()); }
  int vacuum() const;  // basis index of the zero-occupation state
};

// modes = grid nodes inside the cutoff ball
TruncatedFock make_space(const grid::GridSpec& g, const Cutoff& cutoff,
                         int n_max, int max_dim = 5000);
TruncatedFock make_space_from_modes(std::vector<Vec2> k, std::vector<double> w,
                                    int n_max, int max_dim = 5000);

// fiber Hamiltonian at total momentum xi on the truncated space:
//   diag: psi(xi - sum n_j k_j) + sum n_j omega(k_j) + E^ren
//   offdiag: v(k_j) sqrt(w_j) sqrt(n_j + 1) between n and n + e_j
// eigendecomposition is computed eagerly (real symmetric)
struct FiberOperator {
  Eigen::MatrixXd h;
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  double e_ren = 0.0;

  double ground_energy() const { return evals.minCoeff(); }
  Eigen::MatrixXd semigroup(double t) const;
  Eigen::VectorXcd evolve(double t, const Eigen::VectorXcd& v) const;
  complexd pairing(double t, const Eigen::VectorXcd& bra,
                   const Eigen::VectorXcd& ket) const;
};

FiberOperator build_fiber(const TruncatedFock& space, const ModelParams& p,
                          const Vec2& xi, action::ErenMode eren);

// unnormalized coherent vector eps(f) in the occupation basis:
// prod_j (sqrt(w_j) f(k_j))^{n_j} / sqrt(n_j!)
Eigen::VectorXcd coherent_vector(const TruncatedFock& space,
                                 const std::function<complexd(const Vec2&)>& f);

// finite-difference consistency of the semigroup with its generator:
// ||(T_h v - v)/h + H v|| / ||H v||, which is O(h) as h -> 0
double generator_residual(const FiberOperator& op, double h,
                          const Eigen::VectorXcd& v);

// || T_{s+t} - T_s T_t ||_F; roundoff-level for the spectral form
double semigroup_product_gap(const FiberOperator& op, double s, double t);

struct ScanRow {
  double lambda = 0.0;
  Vec2 xi;
  int modes = 0;
  int n_max = 0;
  double e0 = 0.0;        // ground energy with the mode-sum subtraction
  double e0_unren = 0.0;  // ground energy without any subtraction
  double pt_residual = 0.0;  // |e0_unren + mode-sum| = O(g^4)
};

// ground-state scan over cutoffs; for each lambda the mode set is built
// from a fresh grid with r_max = lambda at the given per-octave density
std::vector<ScanRow> renormalization_scan(const ModelParams& p,
                                          const std::vector<double>& lambdas,
                                          const Vec2& xi, int n_max,
                                          int radial_per_octave, int angular,
                                          int max_dim = 5000);

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows);

}  // namespace rnm::oracle
