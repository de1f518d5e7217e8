#pragma once

#include <functional>

#include "rnm/types.hpp"

namespace rnm::quad {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;  // error estimate from the Kronrod rule
  int intervals = 0;
};

// adaptive Gauss-Kronrod (7,15) on [a,b]; bisects the interval with the
// largest error estimate until abs_tol or rel_tol is met.  Throws
// NumericalError if max_intervals is exhausted first.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 0.0, double rel_tol = 1e-12,
                 int max_intervals = 2048);

// integral over [a, inf): maps the tail to a bounded interval via
// t -> a + s/(1-s).  f must decay at infinity.
Result integrate_to_inf(const std::function<double(double)>& f, double a,
                        double abs_tol = 0.0, double rel_tol = 1e-12,
                        int max_intervals = 2048);

// Gauss-Legendre nodes and weights on [-1,1], n <= 64.
// Newton iteration on the Legendre recurrence; deterministic.
void gauss_legendre(int n, double* nodes, double* weights);

}  // namespace rnm::quad
