#include "rnm/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "rnm/fock.hpp"
#include "rnm/model.hpp"
#include "rnm/quad.hpp"

namespace rnm::mc {

void RunParams::validate() const {
  if (!(t > 0.0)) throw std::invalid_argument("mc: horizon must be > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("mc: eps must be > 0");
  if (n_paths == 0 || n_paths > 20000000)
    throw std::invalid_argument("mc: n_paths out of range");
  if (threads < 1 || threads > 256)
    throw std::invalid_argument("mc: threads out of range");
}

namespace {

// fixed-shape pairwise tree; the block base case keeps the recursion shallow
template <typename T, typename At>
T pairwise(const At& at, std::uint64_t lo, std::uint64_t hi) {
  if (hi - lo <= 64) {
    T s{};
    for (std::uint64_t i = lo; i < hi; ++i) s += at(i);
    return s;
  }
  const std::uint64_t mid = lo + (hi - lo) / 2;
  return pairwise<T>(at, lo, mid) + pairwise<T>(at, mid, hi);
}

template <typename At>
Estimate reduce_by(const At& at, std::uint64_t n) {
  Estimate e;
  e.n = n;
  e.mean = pairwise<complexd>(at, 0, n) / static_cast<double>(n);
  if (n > 1) {
    const complexd mu = e.mean;
    const double ss = pairwise<double>(
        [&](std::uint64_t i) { return std::norm(at(i) - mu); }, 0, n);
    e.std_err = std::sqrt(ss / (static_cast<double>(n - 1) *
                                static_cast<double>(n)));
  }
  return e;
}

}  // namespace

Estimate reduce_column(const std::vector<complexd>& values, int cols, int j) {
  const std::uint64_t n = values.size() / cols;
  return reduce_by([&](std::uint64_t i) { return values[i * cols + j]; }, n);
}

Estimate reduce_diff(const std::vector<complexd>& values, int cols, int j1,
                     int j0) {
  const std::uint64_t n = values.size() / cols;
  return reduce_by(
      [&](std::uint64_t i) {
        return values[i * cols + j1] - values[i * cols + j0];
      },
      n);
}

void run_paths(const RunParams& run, double m_p, int cols,
               const std::function<void(std::uint64_t, const levy::LevyPath&,
                                        complexd*)>& fn,
               std::vector<complexd>& out) {
  run.validate();
  if (cols < 1) throw std::invalid_argument("run_paths: cols < 1");
  out.assign(run.n_paths * cols, complexd());
  auto worker = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      const auto path = levy::sample_path(run.t, run.eps, m_p, run.seed, i);
      fn(i, path, &out[i * cols]);
    }
  };
  const int nt = run.threads;
  if (nt == 1) {
    worker(0, run.n_paths);
    return;
  }
  // block partition; results are keyed by path index, so the split never
  // shows up in the output
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(nt);
  const std::uint64_t block = (run.n_paths + nt - 1) / nt;
  for (int k = 0; k < nt; ++k) {
    const std::uint64_t lo = std::min<std::uint64_t>(k * block, run.n_paths);
    const std::uint64_t hi = std::min<std::uint64_t>(lo + block, run.n_paths);
    if (lo >= hi) break;
    pool.emplace_back([&, k, lo, hi] {
      try {
        worker(lo, hi);
      } catch (...) {
        errs[k] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

std::vector<Estimate> fiber_semigroup(const action::PathEvaluator& ev,
                                      const PairingSpec& spec,
                                      const RunParams& run) {
  const auto& opts = ev.options();
  const int nc = static_cast<int>(opts.cutoffs.size());
  const bool vac = spec.f_in == nullptr && spec.g_out == nullptr;
  if (!vac && !opts.want_fields)
    throw std::invalid_argument(
        "fiber_semigroup: coherent labels need an evaluator with want_fields");
  for (const auto* fv : {spec.f_in, spec.g_out})
    if (fv && fv->grid().get() != ev.grid().get())
      throw std::invalid_argument("fiber_semigroup: label on a different grid");
  if (spec.analytic && !(spec.eta.norm() < ev.params().m_p))
    throw std::invalid_argument(
        "fiber_semigroup: continuation shift outside the strip");
  const grid::FieldVector zero = grid::FieldVector::zero(ev.grid());
  const grid::FieldVector& fin = spec.f_in ? *spec.f_in : zero;
  const grid::FieldVector& gout = spec.g_out ? *spec.g_out : zero;
  const double mb = ev.params().m_b;

  std::vector<complexd> vals;
  run_paths(
      run, ev.params().m_p, nc,
      [&](std::uint64_t, const levy::LevyPath& path, complexd* row) {
        const auto F = ev.evaluate(path);
        for (int ci = 0; ci < nc; ++ci) {
          complexd el;
          if (vac) {
            complexd expo = F[ci].u - complexd(0.0, spec.xi.dot(F[ci].x_t));
            if (spec.analytic) expo += spec.eta.dot(F[ci].x_t);
            el = std::exp(expo);
          } else {
            // <eps(f)| What eps(g)>; the conjugate below turns it into the
            // semigroup element <eps(g)| T eps(f)>
            el = spec.analytic
                     ? fock::fiber_w_element_analytic(F[ci], spec.xi, spec.eta,
                                                      gout, fin, mb)
                     : fock::fiber_w_element(F[ci], spec.xi, gout, fin, mb);
          }
          row[ci] = std::conj(el);
        }
      },
      vals);
  std::vector<Estimate> out;
  out.reserve(nc);
  for (int ci = 0; ci < nc; ++ci) out.push_back(reduce_column(vals, nc, ci));
  return out;
}

std::vector<Estimate> analytic_fiber(const action::PathEvaluator& ev,
                                     const Vec2& xi, const Vec2& eta,
                                     const grid::FieldVector* f_in,
                                     const grid::FieldVector* g_out,
                                     const RunParams& run) {
  PairingSpec spec;
  spec.xi = xi;
  spec.eta = eta;
  spec.analytic = true;
  spec.f_in = f_in;
  spec.g_out = g_out;
  return fiber_semigroup(ev, spec, run);
}

SweepResult lambda_sweep(const action::PathEvaluator& ev,
                         const PairingSpec& spec, const RunParams& run) {
  const auto& opts = ev.options();
  const int nc = static_cast<int>(opts.cutoffs.size());
  const bool vac = spec.f_in == nullptr && spec.g_out == nullptr;
  if (!vac && !opts.want_fields)
    throw std::invalid_argument(
        "lambda_sweep: coherent labels need an evaluator with want_fields");
  const grid::FieldVector zero = grid::FieldVector::zero(ev.grid());
  const grid::FieldVector& fin = spec.f_in ? *spec.f_in : zero;
  const grid::FieldVector& gout = spec.g_out ? *spec.g_out : zero;
  const double mb = ev.params().m_b;

  std::vector<complexd> vals;
  run_paths(
      run, ev.params().m_p, nc,
      [&](std::uint64_t, const levy::LevyPath& path, complexd* row) {
        const auto F = ev.evaluate(path);
        for (int ci = 0; ci < nc; ++ci) {
          complexd el;
          if (vac) {
            el = std::exp(F[ci].u - complexd(0.0, spec.xi.dot(F[ci].x_t)));
          } else {
            el = fock::fiber_w_element(F[ci], spec.xi, gout, fin, mb);
          }
          row[ci] = std::conj(el);
        }
      },
      vals);
  SweepResult out;
  for (int ci = 0; ci < nc; ++ci)
    out.value.push_back(reduce_column(vals, nc, ci));
  for (int ci = 0; ci + 1 < nc; ++ci)
    out.diff.push_back(reduce_diff(vals, nc, ci + 1, ci));
  return out;
}

OracleCompare mc_vs_oracle(const ModelParams& p, grid::GridPtr grid,
                           const Cutoff& cutoff, const Vec2& xi,
                           const std::function<complexd(const Vec2&)>& f_in,
                           const std::function<complexd(const Vec2&)>& g_out,
                           int n_max, const RunParams& run, int max_dim) {
  auto space = oracle::make_space(*grid, cutoff, n_max, max_dim);
  auto op = oracle::build_fiber(space, p, xi, action::ErenMode::grid_sum);

  auto state = [&](const std::function<complexd(const Vec2&)>& f) {
    if (f) return oracle::coherent_vector(space, f);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space.dim());
    v[space.vacuum()] = 1.0;
    return v;
  };
  OracleCompare out;
  out.dim = space.dim();
  out.modes = space.modes();
  out.oracle = op.pairing(run.t, state(g_out), state(f_in));

  action::EvalOptions opts;
  opts.cutoffs = {cutoff};
  opts.eren = action::ErenMode::grid_sum;
  opts.want_fields = static_cast<bool>(f_in) || static_cast<bool>(g_out);
  action::PathEvaluator ev(p, grid, opts);

  grid::FieldVector ff = f_in ? grid::FieldVector::from_function(grid, f_in)
                              : grid::FieldVector::zero(grid);
  grid::FieldVector gg = g_out ? grid::FieldVector::from_function(grid, g_out)
                               : grid::FieldVector::zero(grid);
  PairingSpec spec;
  spec.xi = xi;
  spec.f_in = f_in ? &ff : nullptr;
  spec.g_out = g_out ? &gg : nullptr;
  out.mc = fiber_semigroup(ev, spec, run)[0];
  out.gap = std::abs(out.mc.mean - out.oracle);
  return out;
}

SemigroupCheck semigroup_check(const action::PathEvaluator& ev, const Vec2& xi,
                               const grid::FieldVector& f,
                               const grid::FieldVector& g,
                               const RunParams& run, int oracle_n_max,
                               int oracle_max_dim) {
  if (!ev.options().want_fields)
    throw std::invalid_argument("semigroup_check: evaluator needs want_fields");
  std::vector<complexd> vals;
  const double t = run.t;
  const std::uint64_t n = run.n_paths;
  run_paths(
      run, ev.params().m_p, 1,
      [&](std::uint64_t i, const levy::LevyPath& path, complexd* row) {
        // deterministic split schedule spread over the open interval
        const double s = t * (static_cast<double>(i) + 0.5) /
                         static_cast<double>(n);
        row[0] = fock::flow_check(ev, path, s, 0, xi, f, g);
      },
      vals);
  std::vector<double> r(n);
  for (std::uint64_t i = 0; i < n; ++i) r[i] = vals[i].real();
  std::sort(r.begin(), r.end());
  SemigroupCheck out;
  out.flow_median = r[(n - 1) / 2];
  out.flow_p99 =
      r[std::min<std::uint64_t>(n - 1, static_cast<std::uint64_t>(
                                           0.99 * static_cast<double>(n)))];

  auto space = oracle::make_space(*ev.grid(), ev.options().cutoffs[0],
                                  oracle_n_max, oracle_max_dim);
  auto op = oracle::build_fiber(space, ev.params(), xi, ev.options().eren);
  out.oracle_gap = oracle::semigroup_product_gap(op, 0.4 * t, 0.6 * t);
  out.oracle_dim = space.dim();
  return out;
}

std::vector<Estimate> moment_sup(const action::PathEvaluator& ev,
                                 const RunParams& run) {
  const auto& opts = ev.options();
  if (opts.sample_times.empty() && !opts.want_event_samples)
    throw std::invalid_argument(
        "moment_sup: evaluator must sample the path interior");
  const int nc = static_cast<int>(opts.cutoffs.size());
  std::vector<complexd> vals;
  run_paths(
      run, ev.params().m_p, nc,
      [&](std::uint64_t, const levy::LevyPath& path, complexd* row) {
        const auto F = ev.evaluate(path);
        for (int ci = 0; ci < nc; ++ci) {
          double m = 1.0;  // s = 0, u = 0
          for (const complexd& z : F[ci].u_at)
            m = std::max(m, std::exp(2.0 * z.real()));
          for (const complexd& z : F[ci].u_event)
            m = std::max(m, std::exp(2.0 * z.real()));
          m = std::max(m, std::exp(2.0 * F[ci].u.real()));
          row[ci] = m;
        }
      },
      vals);
  std::vector<Estimate> out;
  for (int ci = 0; ci < nc; ++ci) out.push_back(reduce_column(vals, nc, ci));
  return out;
}

namespace {

struct Box1d {
  Eigen::ArrayXd x, w;  // scaled nodes and weights
};

Box1d scale_rule(const Eigen::ArrayXd& n01, const Eigen::ArrayXd& w01,
                 double center, double half) {
  Box1d b;
  b.x = center + half * n01;
  b.w = half * w01;
  return b;
}

struct FullGeom {
  double s1 = 1.0, s2 = 1.0;
  Vec2 c1, c2;
  double nrm = 0.0;    // product of the two position norms
  double wprod = 0.0;  // width of the product Gaussian in x
  double xhalf = 0.0;
  double qhalf = 0.0;
  double qnorm = 0.0;
  Eigen::ArrayXd nx, wx, nq, wq;
};

FullGeom make_geom(const FullPairingSpec& spec) {
  if (spec.x_quad < 2 || spec.x_quad > 64 || spec.xi_quad < 2 ||
      spec.xi_quad > 64)
    throw std::invalid_argument("full pairing: quadrature size out of range");
  FullGeom geo;
  geo.s1 = spec.rho_in.sigma;
  geo.s2 = spec.rho_out.sigma;
  if (!(geo.s1 > 0.0) || !(geo.s2 > 0.0))
    throw std::invalid_argument("full pairing: state width must be > 0");
  geo.c1 = spec.rho_in.center;
  geo.c2 = spec.rho_out.center;
  geo.nrm = 1.0 / (M_PI * geo.s1 * geo.s2);
  geo.wprod = geo.s1 * geo.s2 / std::sqrt(geo.s1 * geo.s1 + geo.s2 * geo.s2);
  geo.xhalf = spec.x_pad * geo.wprod;
  // momentum envelope exp(-(s1^2+s2^2)|xi|^2/2), phase exp(i xi.(X+c2-c1))
  geo.qhalf = spec.xi_pad / std::sqrt(geo.s1 * geo.s1 + geo.s2 * geo.s2);
  geo.qnorm = geo.s1 * geo.s2 / M_PI;
  geo.nx.resize(spec.x_quad);
  geo.wx.resize(spec.x_quad);
  quad::gauss_legendre(spec.x_quad, geo.nx.data(), geo.wx.data());
  geo.nq.resize(spec.xi_quad);
  geo.wq.resize(spec.xi_quad);
  quad::gauss_legendre(spec.xi_quad, geo.nq.data(), geo.wq.data());
  return geo;
}

// center of the product Gaussian rho_out(x) rho_in(x + X)
Vec2 product_center(const FullGeom& geo, const Vec2& X) {
  const double iv = 1.0 / (geo.s1 * geo.s1) + 1.0 / (geo.s2 * geo.s2);
  return Vec2((geo.c2.x / (geo.s2 * geo.s2) +
               (geo.c1.x - X.x) / (geo.s1 * geo.s1)) /
                  iv,
              (geo.c2.y / (geo.s2 * geo.s2) +
               (geo.c1.y - X.y) / (geo.s1 * geo.s1)) /
                  iv);
}

double gauss_pair(const FullGeom& geo, double x, double y, const Vec2& X) {
  const double dx1 = x + X.x - geo.c1.x, dy1 = y + X.y - geo.c1.y;
  const double dx2 = x - geo.c2.x, dy2 = y - geo.c2.y;
  return geo.nrm *
         std::exp(-(dx1 * dx1 + dy1 * dy1) / (2.0 * geo.s1 * geo.s1) -
                  (dx2 * dx2 + dy2 * dy2) / (2.0 * geo.s2 * geo.s2));
}

}  // namespace

Estimate full_pairing(const action::PathEvaluator& ev,
                      const FullPairingSpec& spec, const RunParams& run) {
  const auto& opts = ev.options();
  const bool vac = spec.f_in == nullptr && spec.g_out == nullptr;
  if (!vac && !opts.want_fields)
    throw std::invalid_argument(
        "full_pairing: coherent labels need an evaluator with want_fields");
  for (const auto* fv : {spec.f_in, spec.g_out})
    if (fv && fv->grid().get() != ev.grid().get())
      throw std::invalid_argument("full_pairing: label on a different grid");
  const auto& g = ev.grid();
  const double mb = ev.params().m_b;
  const grid::FieldVector zero = grid::FieldVector::zero(g);
  const grid::FieldVector& fin = spec.f_in ? *spec.f_in : zero;
  const grid::FieldVector& gout = spec.g_out ? *spec.g_out : zero;
  const FullGeom geo = make_geom(spec);
  const int nquad = spec.x_quad;

  // constant heat part of the label pairing <f, e^{-t omega} g>
  const complexd hfg =
      vac ? complexd() : grid::inner(fin, grid::apply_heat(run.t, gout, mb));
  const int keep = vac ? 0 : g->nodes_below(opts.cutoffs[0]);

  std::vector<complexd> vals;
  run_paths(
      run, ev.params().m_p, 1,
      [&](std::uint64_t, const levy::LevyPath& path, complexd* row) {
        const auto F = ev.evaluate(path)[0];
        const Vec2 X = F.x_t;

        // mode coefficients of the two x-dependent phase sums
        Eigen::ArrayXcd cm(keep), cpls(keep);
        if (!vac) {
          const auto& up = F.u_plus->amp();
          const auto& um = F.u_minus->amp();
          for (int k = 0; k < keep; ++k) {
            const double w = g->weight()[k];
            cm[k] = w * std::conj(um[k]) * gout.amp()[k];
            cpls[k] = w * std::conj(fin.amp()[k]) * up[k];
          }
        }

        const Vec2 mc = product_center(geo, X);
        const Box1d bx = scale_rule(geo.nx, geo.wx, mc.x, geo.xhalf);
        const Box1d by = scale_rule(geo.nx, geo.wx, mc.y, geo.xhalf);
        complexd A = 0.0;
        Eigen::ArrayXd arg(keep), cosv(keep), sinv(keep);
        for (int i = 0; i < nquad; ++i) {
          for (int j = 0; j < nquad; ++j) {
            const double x = bx.x[i], y = by.x[j];
            complexd expo = F.u;
            if (!vac) {
              arg = g->kx().head(keep) * x + g->ky().head(keep) * y;
              cosv = arg.cos();
              sinv = arg.sin();
              // S-(x) = <e_x U-, g>, S+(x) = <f, e_x U+>
              const complexd sm =
                  (cm * cosv).sum() + complexd(0.0, 1.0) * (cm * sinv).sum();
              const complexd sp =
                  (cpls * cosv).sum() - complexd(0.0, 1.0) * (cpls * sinv).sum();
              expo += hfg - sm - sp;
            }
            A += bx.w[i] * by.w[j] * gauss_pair(geo, x, y, X) *
                 std::conj(std::exp(expo));
          }
        }
        row[0] = A;
      },
      vals);
  return reduce_column(vals, 1, 0);
}

FiberFullGap fiber_vs_full(const action::PathEvaluator& ev,
                           const FullPairingSpec& spec, const RunParams& run) {
  if (spec.f_in != nullptr || spec.g_out != nullptr)
    throw std::invalid_argument(
        "fiber_vs_full: vacuum field sector only; the fiber decomposition "
        "carries a position-dependent gauge twist that mixes coherent labels "
        "across fibers");
  const FullGeom geo = make_geom(spec);
  const int nx = spec.x_quad, nq = spec.xi_quad;

  std::vector<complexd> vals;
  run_paths(
      run, ev.params().m_p, 3,
      [&](std::uint64_t, const levy::LevyPath& path, complexd* row) {
        const auto F = ev.evaluate(path)[0];
        const Vec2 X = F.x_t;
        const complexd cw = std::conj(std::exp(F.u));

        // full route: position quadrature of the translated state overlap;
        // the vacuum diagonal of the dressing is x-independent, so the path
        // factor multiplies a pure Gaussian integral
        const Vec2 mc = product_center(geo, X);
        const Box1d bx = scale_rule(geo.nx, geo.wx, mc.x, geo.xhalf);
        const Box1d by = scale_rule(geo.nx, geo.wx, mc.y, geo.xhalf);
        double overlap = 0.0;
        for (int i = 0; i < nx; ++i)
          for (int j = 0; j < nx; ++j)
            overlap += bx.w[i] * by.w[j] * gauss_pair(geo, bx.x[i], by.x[j], X);
        const complexd A = cw * overlap;

        // fibered route: the fiber element at momentum xi is the xi = 0
        // element times e^{-i xi.X}, so the xi integral sees a pure phase
        const Vec2 d(X.x + geo.c2.x - geo.c1.x, X.y + geo.c2.y - geo.c1.y);
        complexd q = 0.0;
        for (int i = 0; i < nq; ++i) {
          for (int j = 0; j < nq; ++j) {
            const double qx = geo.qhalf * geo.nq[i], qy = geo.qhalf * geo.nq[j];
            const double env =
                geo.qnorm *
                std::exp(-0.5 * (geo.s1 * geo.s1 + geo.s2 * geo.s2) *
                         (qx * qx + qy * qy));
            const double ph = qx * d.x + qy * d.y;
            q += (geo.qhalf * geo.wq[i]) * (geo.qhalf * geo.wq[j]) * env *
                 complexd(std::cos(ph), std::sin(ph));
          }
        }
        const complexd B = cw * q;

        row[0] = A;
        row[1] = B;
        row[2] = A - B;
      },
      vals);
  FiberFullGap out;
  out.full = reduce_column(vals, 3, 0);
  out.fibered = reduce_column(vals, 3, 1);
  out.diff = reduce_column(vals, 3, 2);
  return out;
}

}  // namespace rnm::mc
