#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "rnm/types.hpp"

namespace rnm::grid {

struct GridParams {
  int radial = 128;            // target total radial node count
  int angular = 64;            // angular nodes; must be even (k -> -k closure)
  double r_max = 8.0;
  std::vector<double> breaks;  // mandatory radial panel edges (cutoffs in use)
};

// polar quadrature rule on the disc |k| < r_max: composite Gauss-Legendre
// panels in radius (panel edges at every requested break, plus geometric
// fill so no panel spans more than a factor-2 radius ratio) x uniform
// angles.  Node order is radial-major, so the nodes inside any panel edge
// form a contiguous prefix.  No node sits exactly on an edge, which makes
// restriction to a ball an exact sub-rule.
class GridSpec {
 public:
  static std::shared_ptr<const GridSpec> build(const GridParams& params);

  int n_nodes() const { return static_cast<int>(kx_.size()); }
  int n_radial() const { return static_cast<int>(r_nodes_.size()); }
  int n_angular() const { return angular_; }
  double r_max() const { return r_max_; }

  const Eigen::ArrayXd& kx() const { return kx_; }
  const Eigen::ArrayXd& ky() const { return ky_; }
  const Eigen::ArrayXd& weight() const { return w_; }   // includes r dr dtheta
  const Eigen::ArrayXd& radius() const { return r_; }
  const std::vector<double>& panel_edges() const { return edges_; }

  bool has_edge(double r) const;
  // number of nodes with |k| < lambda; lambda must be a panel edge (exact
  // restriction), r_max, or larger
  int nodes_below(double lambda) const;
  int nodes_below(const Cutoff& c) const {
    return c.is_finite() ? nodes_below(c.radius()) : n_nodes();
  }

 private:
  GridSpec() = default;
  Eigen::ArrayXd kx_, ky_, w_, r_;
  Eigen::ArrayXd r_nodes_, r_weights_;
  std::vector<double> edges_;
  int angular_ = 0;
  double r_max_ = 0.0;
};

using GridPtr = std::shared_ptr<const GridSpec>;

// complex amplitude per grid node; carries its grid so that vectors living
// on different discretizations can never silently combine
class FieldVector {
 public:
  FieldVector(GridPtr grid, Eigen::ArrayXcd amp);
  static FieldVector zero(GridPtr grid);
  static FieldVector from_radial(GridPtr grid,
                                 const std::function<double(double)>& f);
  static FieldVector from_function(
      GridPtr grid, const std::function<complexd(const Vec2&)>& f);

  const GridPtr& grid() const { return grid_; }
  const Eigen::ArrayXcd& amp() const { return amp_; }
  Eigen::ArrayXcd& amp() { return amp_; }

  FieldVector operator+(const FieldVector& o) const;
  FieldVector operator-(const FieldVector& o) const;
  FieldVector operator*(complexd s) const;

 private:
  GridPtr grid_;
  Eigen::ArrayXcd amp_;
};

// <f|g> = sum_k w_k conj(f_k) g_k, antilinear in the first argument
complexd inner(const FieldVector& f, const FieldVector& g);
double norm2(const FieldVector& f);
// ||f||_t^2 = ||f||^2 + ||(t omega)^{-1/2} f||^2
double norm_t2(const FieldVector& f, double t, double m_b);

// pointwise e_x(k) f(k) with e_x(k) = e^{-i k.x}
FieldVector apply_phase(const Vec2& x, const FieldVector& f);
// pointwise e^{-s omega(k)} f(k)
FieldVector apply_heat(double s, const FieldVector& f, double m_b);
// restrict to B_lambda (zero outside); lambda must align with a panel edge
FieldVector cutoff_mask(const Cutoff& c, const FieldVector& f);

// omega evaluated on all nodes
Eigen::ArrayXd omega_nodes(const GridSpec& g, double m_b);

void require_same_grid(const FieldVector& a, const FieldVector& b);

}  // namespace rnm::grid
