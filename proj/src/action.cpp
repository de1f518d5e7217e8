#include "rnm/action.hpp"

#include <algorithm>
#include <cmath>

#include "rnm/model.hpp"

namespace rnm::action {

namespace {

// sum over one band of (complex array) * (real array)
inline complexd banded_dot(const Eigen::ArrayXcd& c, const Eigen::ArrayXd& r,
                           int start, int len) {
  const auto cs = c.segment(start, len);
  const auto rs = r.segment(start, len);
  return complexd((cs.real() * rs).sum(), (cs.imag() * rs).sum());
}

inline double banded_dot_real(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b,
                              int start, int len) {
  return (a.segment(start, len) * b.segment(start, len)).sum();
}

struct Breakpoint {
  double time;
  int kind;  // 0 jump, 1 sample, 2 horizon; jumps processed first at ties
  int index;
};

}  // namespace

PathEvaluator::PathEvaluator(const ModelParams& params, grid::GridPtr grid,
                             EvalOptions options)
    : params_(params), grid_(std::move(grid)), opts_(std::move(options)) {
  params_.validate();
  if (!grid_) throw std::invalid_argument("PathEvaluator: null grid");
  if (opts_.cutoffs.empty())
    throw std::invalid_argument("PathEvaluator: no cutoffs requested");

  const int n = grid_->n_nodes();
  omega_ = grid::omega_nodes(*grid_, params_.m_b);
  Eigen::ArrayXd psi(n), beta(n);
  v_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double r = grid_->radius()[i];
    psi[i] = model::psi_norm(r, params_.m_p);
    v_[i] = model::coupling_v_norm(r, params_);
    beta[i] = model::beta_norm(r, params_);
  }
  const Eigen::ArrayXd& w = grid_->weight();
  bw_ = beta * w;
  vw_ = v_ * w;
  v2w_ = v_ * v_ * w;
  psibw_ = psi * bw_;
  vpsibw_ = v_ * psi * bw_;

  // band boundaries: node prefix counts of every distinct finite cutoff
  // (validated against panel edges inside nodes_below), plus the full grid
  std::vector<int> prefixes;
  for (const Cutoff& c : opts_.cutoffs) prefixes.push_back(grid_->nodes_below(c));
  std::vector<int> sorted = prefixes;
  sorted.push_back(n);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  band_start_ = {0};
  for (int p : sorted)
    if (p > 0) band_start_.push_back(p);
  for (size_t i = 0; i < opts_.cutoffs.size(); ++i) {
    const auto it =
        std::find(band_start_.begin(), band_start_.end(), prefixes[i]);
    bands_for_cutoff_.push_back(
        static_cast<int>(it - band_start_.begin()));
  }

  // subtraction constants per cutoff
  for (const Cutoff& c : opts_.cutoffs) {
    if (opts_.eren == ErenMode::quadrature) {
      eren_.push_back(c.is_finite()
                          ? model::e_ren(params_, c)
                          : std::numeric_limits<double>::quiet_NaN());
    } else {
      const int keep = grid_->nodes_below(c);
      eren_.push_back(keep > 0 ? (v_.head(keep) * bw_.head(keep)).sum() : 0.0);
    }
  }

  for (double s : opts_.sample_times)
    if (!(s >= 0.0)) throw std::invalid_argument("sample_times must be >= 0");
}

std::vector<PathFunctionals> PathEvaluator::evaluate(
    const levy::LevyPath& path_in) const {
  const levy::LevyPath path = opts_.filter_eps > path_in.eps
                                  ? path_in.filtered(opts_.filter_eps)
                                  : path_in;
  const double T = path.horizon;
  for (double s : opts_.sample_times)
    if (s > T)
      throw std::invalid_argument("sample time beyond the path horizon");

  const int n = grid_->n_nodes();
  const int nb = static_cast<int>(band_start_.size()) - 1;
  const auto blen = [this](int b) { return band_start_[b + 1] - band_start_[b]; };

  // sweep state
  Eigen::ArrayXcd a = Eigen::ArrayXcd::Zero(n);   // U+ at current time
  Eigen::ArrayXcd p(n);                           // e^{-i k.X} at current time
  p.setOnes();
  Eigen::ArrayXd att;                             // e^{-s omega} (U- only)
  Eigen::ArrayXcd um;
  const bool fields = opts_.want_fields;
  if (fields) {
    att = Eigen::ArrayXd::Ones(n);
    um = Eigen::ArrayXcd::Zero(n);
  }
  // per-band accumulators
  std::vector<complexd> accA(nb), accC(nb), accJ(nb);

  // scratch
  Eigen::ArrayXd E(n), D(n), c2(n), arg(n);
  Eigen::ArrayXcd cp(n), pj(n);

  const auto advance = [&](double dt) {
    if (dt <= 0.0) return;
    E = (-dt * omega_).exp();
    D = (1.0 - E) / omega_;
    c2 = (dt - D) / omega_;
    cp = a.conjugate() * p;
    cp *= D;
    for (int b = 0; b < nb; ++b) {
      const int s = band_start_[b], l = blen(b);
      if (opts_.want_defining)
        accA[b] += banded_dot(cp, vw_, s, l) +
                   banded_dot_real(c2, v2w_, s, l);
      accC[b] += banded_dot(cp, psibw_, s, l) +
                 banded_dot_real(c2, vpsibw_, s, l);
    }
    a = E * a + (D * v_) * p;
    if (fields) {
      um += (att * D * v_) * p;
      att *= E;
    }
  };

  const auto u_prefix = [&](size_t ci) {
    // J + C - F over the bands this cutoff reads
    complexd total;
    const int bands = bands_for_cutoff_[ci];
    for (int b = 0; b < bands; ++b) total += accJ[b] + accC[b];
    cp = a.conjugate() * p;
    const int keep = bands > 0 ? band_start_[bands] : 0;
    if (keep > 0) total -= banded_dot(cp, bw_, 0, keep);
    return total;
  };

  // breakpoint schedule: jumps, samples, horizon
  std::vector<Breakpoint> sched;
  sched.reserve(path.events.size() + opts_.sample_times.size() + 1);
  for (size_t i = 0; i < path.events.size(); ++i)
    sched.push_back({path.events[i].time, 0, static_cast<int>(i)});
  for (size_t i = 0; i < opts_.sample_times.size(); ++i)
    sched.push_back({opts_.sample_times[i], 1, static_cast<int>(i)});
  sched.push_back({T, 2, 0});
  std::stable_sort(sched.begin(), sched.end(),
                   [](const Breakpoint& x, const Breakpoint& y) {
                     if (x.time != y.time) return x.time < y.time;
                     return x.kind < y.kind;
                   });

  const size_t nc = opts_.cutoffs.size();
  std::vector<PathFunctionals> out(nc);
  for (size_t ci = 0; ci < nc; ++ci) {
    out[ci].cutoff = opts_.cutoffs[ci];
    out[ci].t = T;
    out[ci].e_ren = eren_[ci];
    out[ci].u_at.resize(opts_.sample_times.size());
  }

  double now = 0.0;
  for (const Breakpoint& bp : sched) {
    advance(bp.time - now);
    now = bp.time;
    if (bp.kind == 0) {
      const Vec2& dx = path.events[bp.index].jump;
      arg = -(grid_->kx() * dx.x + grid_->ky() * dx.y);
      pj.real() = arg.cos();
      pj.imag() = arg.sin();
      cp = (a.conjugate() * p) * (pj - 1.0);
      for (int b = 0; b < nb; ++b)
        accJ[b] += banded_dot(cp, bw_, band_start_[b], blen(b));
      p *= pj;
      if (opts_.want_event_samples) {
        for (size_t ci = 0; ci < nc; ++ci) {
          out[ci].event_times.push_back(now);
          out[ci].u_event.push_back(u_prefix(ci));
        }
      }
    } else if (bp.kind == 1) {
      for (size_t ci = 0; ci < nc; ++ci)
        out[ci].u_at[bp.index] = u_prefix(ci);
    } else {
      for (size_t ci = 0; ci < nc; ++ci) {
        out[ci].u = u_prefix(ci);
        out[ci].x_t = path.position(T);
        if (opts_.want_defining) {
          double A = 0.0;
          for (int b = 0; b < bands_for_cutoff_[ci]; ++b)
            A += accA[b].real();
          out[ci].u_defining = A - T * eren_[ci];
        }
        if (fields) {
          const int keep =
              bands_for_cutoff_[ci] > 0 ? band_start_[bands_for_cutoff_[ci]] : 0;
          Eigen::ArrayXcd up = Eigen::ArrayXcd::Zero(n);
          up.head(keep) = a.head(keep);
          Eigen::ArrayXcd dn = Eigen::ArrayXcd::Zero(n);
          dn.head(keep) = um.head(keep);
          out[ci].u_plus.emplace(grid_, std::move(up));
          out[ci].u_minus.emplace(grid_, std::move(dn));
        }
      }
    }
  }
  return out;
}

}  // namespace rnm::action
