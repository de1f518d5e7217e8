#include "rnm/model.hpp"

#include <cmath>

#include "rnm/quad.hpp"

namespace rnm::model {

double psi_norm(double xi_norm, double m_p) {
  if (m_p == 0.0) return std::abs(xi_norm);
  // sqrt(x^2+m^2)-m without cancellation for small |xi|
  const double q2 = xi_norm * xi_norm;
  return q2 / (std::sqrt(q2 + m_p * m_p) + m_p);
}

double omega_norm(double k_norm, double m_b) {
  return std::sqrt(k_norm * k_norm + m_b * m_b);
}

double coupling_v_norm(double k_norm, const ModelParams& p) {
  return p.g / std::sqrt(omega_norm(k_norm, p.m_b));
}

double beta_norm(double k_norm, const ModelParams& p) {
  return coupling_v_norm(k_norm, p) /
         (omega_norm(k_norm, p.m_b) + psi_norm(k_norm, p.m_p));
}

double e_ren(const ModelParams& p, const Cutoff& cutoff, double rel_tol) {
  p.validate();
  if (!cutoff.is_finite())
    throw std::invalid_argument("e_ren: diverges at infinite cutoff");
  const double lambda = cutoff.radius();
  if (lambda == 0.0 || p.g == 0.0) return 0.0;
  auto integrand = [&p](double r) {
    const double om = omega_norm(r, p.m_b);
    const double v = coupling_v_norm(r, p);
    return 2.0 * M_PI * r * v * v / (om + psi_norm(r, p.m_p));
  };
  return quad::integrate(integrand, 0.0, lambda, 0.0, rel_tol).value;
}

double e_ren_closed_equal_mass(double m, double g, double lambda) {
  return M_PI * g * g *
         std::log((2.0 * std::sqrt(lambda * lambda + m * m) - m) / m);
}

double coupling_norm2(const ModelParams& p, const Cutoff& cutoff) {
  if (!cutoff.is_finite())
    throw std::invalid_argument("coupling_norm2: infinite cutoff");
  const double lambda = cutoff.radius();
  return 2.0 * M_PI * p.g * p.g *
         (std::sqrt(lambda * lambda + p.m_b * p.m_b) - p.m_b);
}

double levy_density(double z_norm, double m_p) {
  if (!(z_norm > 0.0)) throw std::invalid_argument("levy_density: |z| must be > 0");
  const double mr = m_p * z_norm;
  return (1.0 + mr) * std::exp(-mr) / (2.0 * M_PI * z_norm * z_norm * z_norm);
}

double jump_rate(double eps, double m_p) {
  if (!(eps > 0.0)) throw std::invalid_argument("jump_rate: eps must be > 0");
  return std::exp(-m_p * eps) / eps;
}

double small_jump_variance(double eps, double m_p) {
  if (!(eps > 0.0))
    throw std::invalid_argument("small_jump_variance: eps must be > 0");
  if (m_p == 0.0) return eps;
  const double x = m_p * eps;
  // (2 - e^{-x}(2+x))/m via expm1 to avoid cancellation at small x
  return (-2.0 * std::expm1(-x) - x * std::exp(-x)) / m_p;
}

double invert_jump_survival(double u, double eps, double m_p) {
  if (!(u > 0.0 && u <= 1.0))
    throw std::invalid_argument("invert_jump_survival: u must be in (0,1]");
  if (!(eps > 0.0))
    throw std::invalid_argument("invert_jump_survival: eps must be > 0");
  if (m_p == 0.0) return eps / u;
  // solve log(eps/r) - m (r - eps) = log u on [eps, hi]; strictly decreasing.
  // both (eps/r) and e^{-m(r-eps)} bound the survival from above, so either
  // factor alone yields a valid upper bracket
  const double log_u = std::log(u);
  double lo = eps;
  double hi = std::min(eps / u, eps - log_u / m_p);
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 80; ++it) {
    const double f = std::log(eps / r) - m_p * (r - eps) - log_u;
    if (f > 0.0)
      lo = r;
    else
      hi = r;
    const double step = f / (1.0 / r + m_p);  // Newton on -f
    double next = r + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) < 1e-15 * r) { r = next; break; }
    r = next;
  }
  return r;
}

double symbol_from_levy(double xi_norm, double m_p, double rel_tol) {
  const double q = std::abs(xi_norm);
  if (q == 0.0) return 0.0;
  // radial integrand 2 pi r (1 - J0(q r)) nu(r); value q^2/4 at r = 0
  auto integrand = [q, m_p](double r) {
    if (r == 0.0) return q * q / 4.0;
    const double x = q * r;
    double one_minus_j0;
    if (x < 0.01) {
      // series; direct subtraction loses precision and the loss is amplified
      // by the 1/r^2 below
      const double x2 = x * x;
      one_minus_j0 = (x2 / 4.0) * (1.0 - x2 / 16.0 + x2 * x2 / 576.0);
    } else {
      one_minus_j0 = 1.0 - std::cyl_bessel_j(0, x);
    }
    const double mr = m_p * r;
    return one_minus_j0 * (1.0 + mr) * std::exp(-mr) / (r * r);
  };
  double r_cut;
  if (m_p > 0.0) {
    // exponential tail: beyond r_cut everything is < e^{-40}
    r_cut = 45.0 / m_p + 10.0 / q;
  } else {
    // oscillatory tail handled analytically below; X^{-5/2} remainder bound
    r_cut = 260.0 / q;
  }
  double total =
      quad::integrate(integrand, 0.0, r_cut, 0.0, rel_tol, 16384).value;
  // tail of the non-oscillatory part: int_{r>R} 2 pi r nu dr = e^{-mR}/R exactly
  total += std::exp(-m_p * r_cut) / r_cut;
  if (m_p == 0.0) {
    // oscillatory remainder -q int_X^inf J0(x)/x^2 dx with X = qR:
    // equals q (J1(X)/X^2 - 3 int_X^inf J1 x^{-3} dx); keep the J1 term,
    // the rest is below q X^{-5/2} ~ 1e-6 q
    const double X = q * r_cut;
    total += q * std::cyl_bessel_j(1, X) / (X * X);
  }
  return total;
}

complexd analytic_symbol(const Vec2& re, const Vec2& im, double m_p) {
  if (im.norm() >= m_p && im.norm() > 0.0)
    throw std::invalid_argument(
        "analytic_symbol: Im(zeta) outside the analyticity strip |Im| < m_p");
  const complexd zx(re.x, im.x), zy(re.y, im.y);
  const complexd s = zx * zx + zy * zy + m_p * m_p;
  return std::sqrt(s) - m_p;
}

}  // namespace rnm::model
