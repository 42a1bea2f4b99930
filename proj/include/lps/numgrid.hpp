// Discrete function-space operations: L_p norms, periodic FFT convolution
// and quadrature against the scale-invariant measure dt/t.
#pragma once

#include "lps/types.hpp"

namespace lps {

// (sum_x ||f(x)||_X^p h^d)^(1/p); max_x ||f(x)||_X for p = infinity.
Scalar lp_norm(const Field& f, Scalar p);

// Same norm for a precomputed nonnegative scalar sample array on a grid.
Scalar lp_norm(const ArrayX& point_norms, const GridSpec& g, Scalar p);

// Plain integral sum_x v(x) h^d of a scalar sample array.
Scalar integral(const ArrayX& values, const GridSpec& g);

// Periodic convolution (k * f)(x) = sum_y k(x-y) f(y) h^d via FFT, applied
// coordinate-wise over the m components of f. k must be scalar (m = 1) and
// share f's grid.
Field convolve(const Field& f, const Field& k);

// (sum_j v_j^q w)^(1/q) over a log time grid; max_j v_j for q = infinity.
Scalar integrate_time(const ArrayX& values, Scalar q, const LogTimeGrid& tgrid);

}  // namespace lps
