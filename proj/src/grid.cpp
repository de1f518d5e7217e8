#include "rnm/grid.hpp"

#include <algorithm>
#include <cmath>

#include "rnm/quad.hpp"

namespace rnm::grid {

namespace {

std::vector<double> make_edges(const GridParams& p) {
  std::vector<double> edges{0.0, p.r_max};
  for (double b : p.breaks) {
    if (!(b > 0.0) || !std::isfinite(b))
      throw std::invalid_argument("GridSpec: breaks must be finite and > 0");
    if (b < p.r_max) edges.push_back(b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  // geometric fill: cap panel radius ratio at 2 so Gauss-Legendre converges
  // uniformly; the innermost panel [0, e1] stays whole
  std::vector<double> out{0.0};
  for (size_t i = 1; i < edges.size(); ++i) {
    const double lo = edges[i - 1], hi = edges[i];
    if (lo > 0.0 && hi > 2.0 * lo) {
      const int splits = static_cast<int>(std::ceil(std::log2(hi / lo))) - 1;
      for (int j = splits; j >= 1; --j) {
        const double e = hi / std::pow(2.0, j);
        if (e > lo * 1.0000001) out.push_back(e);
      }
    }
    out.push_back(hi);
  }
  return out;
}

}  // namespace

std::shared_ptr<const GridSpec> GridSpec::build(const GridParams& p) {
  if (!(p.r_max > 0.0) || !std::isfinite(p.r_max))
    throw std::invalid_argument("GridSpec: r_max must be finite and > 0");
  if (p.angular < 2 || p.angular % 2 != 0)
    throw std::invalid_argument("GridSpec: angular must be even and >= 2");
  if (p.radial < 4) throw std::invalid_argument("GridSpec: radial too small");

  auto g = std::shared_ptr<GridSpec>(new GridSpec());
  g->edges_ = make_edges(p);
  g->angular_ = p.angular;
  g->r_max_ = p.r_max;

  const int n_panels = static_cast<int>(g->edges_.size()) - 1;
  const int per_panel =
      std::clamp(p.radial / n_panels + (p.radial % n_panels != 0), 4, 64);
  const int nr = per_panel * n_panels;
  g->r_nodes_.resize(nr);
  g->r_weights_.resize(nr);
  std::vector<double> xs(per_panel), ws(per_panel);
  quad::gauss_legendre(per_panel, xs.data(), ws.data());
  for (int pi = 0; pi < n_panels; ++pi) {
    const double a = g->edges_[pi], b = g->edges_[pi + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int j = 0; j < per_panel; ++j) {
      g->r_nodes_[pi * per_panel + j] = mid + half * xs[j];
      g->r_weights_[pi * per_panel + j] = half * ws[j];
    }
  }

  // angles 2 pi a / A; the second half is the exact negation of the first so
  // the node set is closed under k -> -k bit-for-bit
  const int A = p.angular;
  std::vector<double> cs(A), sn(A);
  for (int a = 0; a < A / 2; ++a) {
    const double th = 2.0 * M_PI * a / A;
    cs[a] = std::cos(th);
    sn[a] = std::sin(th);
    cs[a + A / 2] = -cs[a];
    sn[a + A / 2] = -sn[a];
  }

  const int n = nr * A;
  g->kx_.resize(n);
  g->ky_.resize(n);
  g->w_.resize(n);
  g->r_.resize(n);
  const double dtheta = 2.0 * M_PI / A;
  for (int i = 0; i < nr; ++i) {
    const double r = g->r_nodes_[i];
    const double wr = g->r_weights_[i] * r * dtheta;
    for (int a = 0; a < A; ++a) {
      const int idx = i * A + a;
      g->kx_[idx] = r * cs[a];
      g->ky_[idx] = r * sn[a];
      g->w_[idx] = wr;
      g->r_[idx] = r;
    }
  }
  return g;
}

bool GridSpec::has_edge(double r) const {
  for (double e : edges_)
    if (e == r) return true;
  return false;
}

int GridSpec::nodes_below(double lambda) const {
  if (lambda >= r_max_) return n_nodes();
  if (!has_edge(lambda))
    throw std::invalid_argument(
        "GridSpec: cutoff " + std::to_string(lambda) +
        " is not a panel edge; rebuild the grid with it in breaks");
  int nr_below = 0;
  while (nr_below < n_radial() && r_nodes_[nr_below] < lambda) ++nr_below;
  return nr_below * angular_;
}

FieldVector::FieldVector(GridPtr grid, Eigen::ArrayXcd amp)
    : grid_(std::move(grid)), amp_(std::move(amp)) {
  if (!grid_) throw std::invalid_argument("FieldVector: null grid");
  if (amp_.size() != grid_->n_nodes())
    throw std::invalid_argument("FieldVector: amplitude size != node count");
}

FieldVector FieldVector::zero(GridPtr grid) {
  const int n = grid->n_nodes();
  return FieldVector(std::move(grid), Eigen::ArrayXcd::Zero(n));
}

FieldVector FieldVector::from_radial(GridPtr grid,
                                     const std::function<double(double)>& f) {
  Eigen::ArrayXcd a(grid->n_nodes());
  for (int i = 0; i < grid->n_nodes(); ++i) a[i] = f(grid->radius()[i]);
  return FieldVector(std::move(grid), std::move(a));
}

FieldVector FieldVector::from_function(
    GridPtr grid, const std::function<complexd(const Vec2&)>& f) {
  Eigen::ArrayXcd a(grid->n_nodes());
  for (int i = 0; i < grid->n_nodes(); ++i)
    a[i] = f(Vec2(grid->kx()[i], grid->ky()[i]));
  return FieldVector(std::move(grid), std::move(a));
}

void require_same_grid(const FieldVector& a, const FieldVector& b) {
  if (a.grid() != b.grid())
    throw std::invalid_argument(
        "FieldVector: operands live on different grids");
}

FieldVector FieldVector::operator+(const FieldVector& o) const {
  require_same_grid(*this, o);
  return FieldVector(grid_, amp_ + o.amp_);
}

FieldVector FieldVector::operator-(const FieldVector& o) const {
  require_same_grid(*this, o);
  return FieldVector(grid_, amp_ - o.amp_);
}

FieldVector FieldVector::operator*(complexd s) const {
  return FieldVector(grid_, amp_ * s);
}

complexd inner(const FieldVector& f, const FieldVector& g) {
  require_same_grid(f, g);
  const Eigen::ArrayXcd prod = f.amp().conjugate() * g.amp();
  return complexd((f.grid()->weight() * prod.real()).sum(),
                  (f.grid()->weight() * prod.imag()).sum());
}

double norm2(const FieldVector& f) {
  return (f.grid()->weight() * f.amp().abs2()).sum();
}

double norm_t2(const FieldVector& f, double t, double m_b) {
  if (!(t > 0.0)) throw std::invalid_argument("norm_t2: t must be > 0");
  const Eigen::ArrayXd om = omega_nodes(*f.grid(), m_b);
  return (f.grid()->weight() * (1.0 + 1.0 / (t * om)) * f.amp().abs2()).sum();
}

FieldVector apply_phase(const Vec2& x, const FieldVector& f) {
  const Eigen::ArrayXd arg =
      -(f.grid()->kx() * x.x + f.grid()->ky() * x.y);
  Eigen::ArrayXcd phase(arg.size());
  phase.real() = arg.cos();
  phase.imag() = arg.sin();
  return FieldVector(f.grid(), f.amp() * phase);
}

FieldVector apply_heat(double s, const FieldVector& f, double m_b) {
  if (!(s >= 0.0)) throw std::invalid_argument("apply_heat: s must be >= 0");
  const Eigen::ArrayXd om = omega_nodes(*f.grid(), m_b);
  return FieldVector(f.grid(), f.amp() * (-s * om).exp());
}

FieldVector cutoff_mask(const Cutoff& c, const FieldVector& f) {
  const int keep = f.grid()->nodes_below(c);
  Eigen::ArrayXcd a = Eigen::ArrayXcd::Zero(f.amp().size());
  a.head(keep) = f.amp().head(keep);
  return FieldVector(f.grid(), std::move(a));
}

Eigen::ArrayXd omega_nodes(const GridSpec& g, double m_b) {
  return (g.radius().square() + m_b * m_b).sqrt();
}

}  // namespace rnm::grid
