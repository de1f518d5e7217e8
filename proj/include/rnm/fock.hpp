#pragma once

#include "rnm/action.hpp"
#include "rnm/grid.hpp"
#include "rnm/levy.hpp"
#include "rnm/types.hpp"

namespace rnm::fock {

// S(z) = sum_n (2z)^n / sqrt(n!), with a geometric remainder bound below
// 1e-14 of the partial sum
double script_S(double z);

// scalar multiple of a coherent vector: e^{log_scale} eps(label).
// Coherent vectors are unnormalized, <eps(g)|eps(h)> = e^{<g|h>}.
struct RankOneWRep {
  complexd log_scale;
  grid::FieldVector label;
};

// action of the dressed propagator started at x on a coherent vector:
//   W_{L,t}(x) eps(f) = e^{u - <e_x U-_t | f>} eps(e^{-t omega} f - e_x U+_t)
// F must carry the exported fields (evaluate with want_fields = true)
RankOneWRep w_on_coherent(const action::PathFunctionals& F, const Vec2& x,
                          const grid::FieldVector& f, double m_b);

// <eps(g) | What_{L,t}(xi) eps(f)> for one path, with
// What_{L,t}(xi) = e^{-i xi.X_t} Gamma(e_{-X_t}) W_{L,t}(0)
complexd fiber_w_element(const action::PathFunctionals& F, const Vec2& xi,
                         const grid::FieldVector& f,
                         const grid::FieldVector& g, double m_b);

// same with the momentum continued to zeta = xi + i eta inside the strip
// |eta| < m_p: the only change is the prefactor e^{i zeta.X_t} -> the
// modulus factor e^{eta.X_t} joins in
complexd fiber_w_element_analytic(const action::PathFunctionals& F,
                                  const Vec2& xi, const Vec2& eta,
                                  const grid::FieldVector& f,
                                  const grid::FieldVector& g, double m_b);

// relative gap between the direct propagator element over [0,t] and the
// composition through the split at s (flow property of the dressing).
// ev must have want_fields set; cutoff_index selects among ev's cutoffs.
double flow_check(const action::PathEvaluator& ev, const levy::LevyPath& path,
                  double s, size_t cutoff_index, const Vec2& xi,
                  const grid::FieldVector& f, const grid::FieldVector& g);

}  // namespace rnm::fock
