#include "rnm/fock.hpp"

#include <cmath>

namespace rnm::fock {

double script_S(double z) {
  if (!(z >= 0.0)) throw std::invalid_argument("script_S: z must be >= 0");
  double term = 1.0, sum = 1.0;
  for (int n = 1; n < 400; ++n) {
    term *= 2.0 * z / std::sqrt(static_cast<double>(n));
    sum += term;
    const double q = 2.0 * z / std::sqrt(n + 1.0);
    if (q < 0.5 && term / (1.0 - q) < 1e-14 * sum) return sum;
  }
  throw NumericalError("script_S: series did not converge");
}

RankOneWRep w_on_coherent(const action::PathFunctionals& F, const Vec2& x,
                          const grid::FieldVector& f, double m_b) {
  if (!F.u_plus || !F.u_minus)
    throw std::invalid_argument(
        "w_on_coherent: path functionals lack fields; evaluate with "
        "want_fields");
  const auto um = grid::apply_phase(x, *F.u_minus);
  const auto up = grid::apply_phase(x, *F.u_plus);
  return {F.u - grid::inner(um, f), grid::apply_heat(F.t, f, m_b) - up};
}

namespace {

complexd element(const complexd& log_scale, const grid::FieldVector& label,
                 const Vec2& x_t, const Vec2& xi,
                 const grid::FieldVector& g) {
  const complexd phase(0.0, -xi.dot(x_t));
  const auto shifted = grid::apply_phase(Vec2(-x_t.x, -x_t.y), label);
  return std::exp(phase + log_scale + grid::inner(g, shifted));
}

}  // namespace

complexd fiber_w_element(const action::PathFunctionals& F, const Vec2& xi,
                         const grid::FieldVector& f,
                         const grid::FieldVector& g, double m_b) {
  const RankOneWRep rep = w_on_coherent(F, Vec2(), f, m_b);
  return element(rep.log_scale, rep.label, F.x_t, xi, g);
}

complexd fiber_w_element_analytic(const action::PathFunctionals& F,
                                  const Vec2& xi, const Vec2& eta,
                                  const grid::FieldVector& f,
                                  const grid::FieldVector& g, double m_b) {
  const RankOneWRep rep = w_on_coherent(F, Vec2(), f, m_b);
  // e^{-i zeta.X_t} with zeta = xi + i eta contributes e^{eta.X_t}
  return std::exp(complexd(eta.dot(F.x_t), 0.0)) *
         element(rep.log_scale, rep.label, F.x_t, xi, g);
}

double flow_check(const action::PathEvaluator& ev, const levy::LevyPath& path,
                  double s, size_t cutoff_index, const Vec2& xi,
                  const grid::FieldVector& f, const grid::FieldVector& g) {
  if (!(s >= 0.0 && s <= path.horizon))
    throw std::invalid_argument("flow_check: split outside [0, horizon]");
  const double m_b = ev.params().m_b;
  const auto full = ev.evaluate(path)[cutoff_index];
  const auto head = ev.evaluate(path.head(s))[cutoff_index];
  const auto tail = ev.evaluate(path.tail_shifted(s))[cutoff_index];
  const Vec2 x_s = path.position(s);
  const Vec2 x_t = full.x_t;

  const complexd direct = fiber_w_element(full, xi, f, g, m_b);

  // W_{0,t}(0) = W_{s,t}(X_s) W_{0,s}(0) applied to eps(f), then paired
  const RankOneWRep first = w_on_coherent(head, Vec2(), f, m_b);
  const RankOneWRep second = w_on_coherent(tail, x_s, first.label, m_b);
  const complexd composed = element(first.log_scale + second.log_scale,
                                    second.label, x_t, xi, g);

  return std::abs(direct - composed) / (std::abs(direct) + 1e-300);
}

}  // namespace rnm::fock
