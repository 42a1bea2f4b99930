#include "lps/quadrature.hpp"

namespace lps {

QuadratureResult trapezoid_refine(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
                                  Scalar tol_rel, Scalar tol_abs, int max_doublings,
                                  Index initial_nodes) {
  QuadratureResult res;
  Index n = std::max<Index>(initial_nodes, 3);
  Scalar h = (b - a) / static_cast<Scalar>(n - 1);
  Scalar sum = 0.5 * (f(a) + f(b));
  for (Index i = 1; i + 1 < n; ++i) sum += f(a + h * static_cast<Scalar>(i));
  Scalar prev = sum * h;
  for (int it = 0; it < max_doublings; ++it) {
    // add midpoints of the current cells
    Scalar mid = 0;
    for (Index i = 0; i + 1 < n; ++i) mid += f(a + h * (static_cast<Scalar>(i) + 0.5));
    const Scalar cur = 0.5 * prev + 0.5 * h * mid;
    n = 2 * n - 1;
    h *= 0.5;
    res.refinements = it + 1;
    res.error_estimate = std::abs(cur - prev);
    res.value = cur;
    if (res.error_estimate <= tol_rel * std::abs(cur) + tol_abs) {
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  return res;
}

namespace {

Scalar simpson_rec(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b, Scalar fa,
                   Scalar fm, Scalar fb, Scalar whole, Scalar tol, int depth) {
  const Scalar m = 0.5 * (a + b);
  const Scalar lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const Scalar flm = f(lm), frm = f(rm);
  const Scalar left = (m - a) / 6 * (fa + 4 * flm + fm);
  const Scalar right = (b - m) / 6 * (fm + 4 * frm + fb);
  const Scalar delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

Scalar adaptive_simpson(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b, Scalar tol,
                        int max_depth) {
  const Scalar m = 0.5 * (a + b);
  const Scalar fa = f(a), fm = f(m), fb = f(b);
  const Scalar whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

QuadratureResult integrate_log_axis(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
                                    Scalar tol_rel, Scalar tol_abs, int max_doublings) {
  if (!(a > 0) || !(a < b)) throw std::invalid_argument("integrate_log_axis: need 0 < a < b");
  auto g = [&f](Scalar u) {
    const Scalar x = std::exp(u);
    return f(x) * x;
  };
  return trapezoid_refine(g, std::log(a), std::log(b), tol_rel, tol_abs, max_doublings);
}

FitResult fit_line(const ArrayX& x, const ArrayX& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
  const Scalar n = static_cast<Scalar>(x.size());
  const Scalar mx = x.mean(), my = y.mean();
  const Scalar sxx = ((x - mx) * (x - mx)).sum();
  const Scalar sxy = ((x - mx) * (y - my)).sum();
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const ArrayX resid = y - (fit.intercept + fit.slope * x);
  const Scalar dof = std::max<Scalar>(n - 2, 1);
  const Scalar s2 = (resid * resid).sum() / dof;
  fit.slope_stderr = std::sqrt(s2 / sxx);
  fit.slope_lo = fit.slope - 2 * fit.slope_stderr;
  fit.slope_hi = fit.slope + 2 * fit.slope_stderr;
  return fit;
}

}  // namespace lps
