// One-dimensional quadrature helpers: trapezoid refinement with doubling,
// adaptive Simpson, and log-axis integrals over (0, inf).
#pragma once

#include "lps/types.hpp"

namespace lps {

struct QuadratureResult {
  Scalar value = 0;
  Scalar error_estimate = 0;
  int refinements = 0;
  bool converged = false;
};

// Trapezoid rule on [a, b], node count doubled until two successive passes
// agree to tol_rel * |I| + tol_abs.
QuadratureResult trapezoid_refine(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
                                  Scalar tol_rel, Scalar tol_abs, int max_doublings = 16,
                                  Index initial_nodes = 65);

// Classic adaptive Simpson on [a, b].
Scalar adaptive_simpson(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
                        Scalar tol, int max_depth = 40);

// integral_a^b f(x) dx through the substitution x = e^u (0 < a < b).
QuadratureResult integrate_log_axis(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
                                    Scalar tol_rel = 1e-10, Scalar tol_abs = 0.0,
                                    int max_doublings = 16);

// Ordinary least squares fit of y against x with a two-sigma slope interval.
struct FitResult {
  Scalar slope = 0;
  Scalar intercept = 0;
  Scalar slope_stderr = 0;
  Scalar slope_lo = 0;
  Scalar slope_hi = 0;
};

FitResult fit_line(const ArrayX& x, const ArrayX& y);

}  // namespace lps
