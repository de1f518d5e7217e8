#include "rnm/levy.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rnm/model.hpp"

namespace rnm::levy {

Vec2 LevyPath::position(double s) const {
  Vec2 x;
  for (const auto& e : events) {
    if (e.time > s) break;
    x += e.jump;
  }
  return x;
}

LevyPath LevyPath::head(double s) const {
  LevyPath out = *this;
  out.horizon = s;
  out.events.clear();
  for (const auto& e : events)
    if (e.time <= s) out.events.push_back(e);
  return out;
}

LevyPath LevyPath::tail_shifted(double s) const {
  LevyPath out = *this;
  out.horizon = horizon - s;
  out.events.clear();
  for (const auto& e : events)
    if (e.time > s) out.events.push_back({e.time - s, e.jump});
  return out;
}

LevyPath LevyPath::filtered(double eps_coarse) const {
  LevyPath out = *this;
  out.eps = eps_coarse;
  out.events.clear();
  for (const auto& e : events)
    if (e.jump.norm() >= eps_coarse) out.events.push_back(e);
  return out;
}

double sample_subordinator(double t, double m_p, Rng& rng) {
  if (!(t > 0.0)) throw std::invalid_argument("sample_subordinator: t must be > 0");
  const double z = rng.normal();
  const double z2 = std::max(z * z, 1e-280);
  if (m_p == 0.0) return t * t / (2.0 * z2);
  // inverse Gaussian, Michael-Schucany-Haas
  const double mu = t / (2.0 * m_p);
  const double lam = t * t / 2.0;
  const double x = mu + mu * mu * z2 / (2.0 * lam) -
                   mu / (2.0 * lam) *
                       std::sqrt(4.0 * mu * lam * z2 + mu * mu * z2 * z2);
  const double u = rng.uniform();
  return (u <= mu / (mu + x)) ? x : mu * mu / x;
}

Vec2 sample_increment(double t, double m_p, Rng& rng) {
  const double s = sample_subordinator(t, m_p, rng);
  double n1, n2;
  rng.normal_pair(n1, n2);
  const double scale = std::sqrt(2.0 * s);
  return Vec2(scale * n1, scale * n2);
}

LevyPath sample_path(double horizon, double eps, double m_p,
                     std::uint64_t master_seed, std::uint64_t path_index) {
  if (!(horizon > 0.0))
    throw std::invalid_argument("sample_path: horizon must be > 0");
  LevyPath path;
  path.horizon = horizon;
  path.eps = eps;
  path.master_seed = master_seed;
  path.path_index = path_index;
  Rng rng(master_seed, path_index);
  const double rate = model::jump_rate(eps, m_p);
  double t = 0.0;
  while (true) {
    t += rng.exponential() / rate;
    if (t > horizon) break;
    const double r = model::invert_jump_survival(rng.uniform(), eps, m_p);
    const double phi = 2.0 * M_PI * rng.uniform();
    path.events.push_back({t, Vec2(r * std::cos(phi), r * std::sin(phi))});
  }
  return path;
}

MomentCheck subordinator_check(double u, double m_p, int n_samples,
                               std::uint64_t seed) {
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    const double v = std::exp(-u * sample_subordinator(1.0, m_p, rng));
    sum += v;
    sum2 += v * v;
  }
  MomentCheck out;
  out.mean = sum / n_samples;
  out.target = std::exp(-(std::sqrt(u + m_p * m_p) - m_p));
  const double var = (sum2 - sum * sum / n_samples) / (n_samples - 1.0);
  out.std_err = std::sqrt(var / n_samples);
  return out;
}

void dump_csv(std::ostream& os, const LevyPath& path) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "# horizon=%.17g eps=%.17g seed=%llu index=%llu\n",
                path.horizon, path.eps,
                static_cast<unsigned long long>(path.master_seed),
                static_cast<unsigned long long>(path.path_index));
  os << buf << "s,dx,dy\n";
  for (const auto& e : path.events) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", e.time, e.jump.x,
                  e.jump.y);
    os << buf;
  }
}

LevyPath load_csv(std::istream& is) {
  LevyPath path;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw std::invalid_argument("load_csv: missing metadata line");
  unsigned long long seed = 0, index = 0;
  if (std::sscanf(line.c_str(), "# horizon=%lg eps=%lg seed=%llu index=%llu",
                  &path.horizon, &path.eps, &seed, &index) != 4)
    throw std::invalid_argument("load_csv: bad metadata line");
  path.master_seed = seed;
  path.path_index = index;
  if (!std::getline(is, line) || line != "s,dx,dy")
    throw std::invalid_argument("load_csv: missing column header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    PathEvent e;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &e.time, &e.jump.x,
                    &e.jump.y) != 3)
      throw std::invalid_argument("load_csv: bad event row: " + line);
    path.events.push_back(e);
  }
  return path;
}

}  // namespace rnm::levy
