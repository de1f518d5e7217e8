#pragma once

#include "rnm/types.hpp"

namespace rnm::model {

// particle dispersion psi(xi) = sqrt(|xi|^2 + m_p^2) - m_p  (psi(0) = 0)
double psi_norm(double xi_norm, double m_p);
inline double psi(const Vec2& xi, double m_p) { return psi_norm(xi.norm(), m_p); }

// boson dispersion omega(k) = sqrt(|k|^2 + m_b^2)
double omega_norm(double k_norm, double m_b);
inline double omega(const Vec2& k, double m_b) { return omega_norm(k.norm(), m_b); }

// form factor v(k) = g * omega(k)^{-1/2}
double coupling_v_norm(double k_norm, const ModelParams& p);

// beta(k) = v(k) / (omega(k) + psi(k))
double beta_norm(double k_norm, const ModelParams& p);

// renormalization constant E^ren_Lambda = int_{B_Lambda} v^2/(omega+psi) dk.
// Diverges logarithmically as Lambda -> inf, so the cutoff must be finite.
double e_ren(const ModelParams& p, const Cutoff& cutoff, double rel_tol = 1e-11);

// closed form for m_p = m_b = m:  pi g^2 log((2 sqrt(Lambda^2+m^2) - m)/m)
double e_ren_closed_equal_mass(double m, double g, double lambda);

// ||v_Lambda||^2 = int_{B_Lambda} g^2/omega dk = 2 pi g^2 (sqrt(L^2+m_b^2) - m_b)
double coupling_norm2(const ModelParams& p, const Cutoff& cutoff);

// rotation-invariant Levy density of the particle process,
//   nu(z) = (1 + m_p |z|) e^{-m_p |z|} / (2 pi |z|^3),
// i.e. the jump measure whose symbol is psi (checked by symbol_from_levy)
double levy_density(double z_norm, double m_p);

// total rate of jumps with |z| >= eps:  e^{-m_p eps} / eps
double jump_rate(double eps, double m_p);

// int_{|z| < eps} |z|^2 nu(z) dz = (2 - e^{-m eps}(2 + m eps)) / m  (-> eps as m->0);
// variance of the discarded small-jump part (both coordinates combined)
double small_jump_variance(double eps, double m_p);

// radius r >= eps with P(jump radius >= r | radius >= eps) = u, i.e. inverse of
// the restricted survival function S(r) = (eps/r) e^{-m (r - eps)}; u in (0,1]
double invert_jump_survival(double u, double eps, double m_p);

// numerical Levy-Khintchine reconstruction of psi from nu:
//   int (1 - cos(xi.z)) nu(z) dz = 2 pi int_0^inf r (1 - J0(|xi| r)) nu(r) dr,
// radial quadrature plus analytic tail.  Test oracle for the density.
double symbol_from_levy(double xi_norm, double m_p, double rel_tol = 1e-9);

// psi continued to complex momentum zeta = re + i*im, principal branch;
// well defined on the strip |im| < m_p (and for m_p = 0 only at im = 0)
complexd analytic_symbol(const Vec2& re, const Vec2& im, double m_p);

}  // namespace rnm::model
