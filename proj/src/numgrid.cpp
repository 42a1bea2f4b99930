#include "lps/numgrid.hpp"

#include "lps/fft.hpp"

namespace lps {

Scalar lp_norm(const ArrayX& point_norms, const GridSpec& g, Scalar p) {
  if (!(p > 1)) throw std::invalid_argument("invalid exponent");
  if (!point_norms.isFinite().all()) throw std::invalid_argument("non-finite field");
  if (std::isinf(p)) return point_norms.size() ? point_norms.maxCoeff() : 0.0;
  const Scalar s = point_norms.pow(p).sum() * g.cell_volume();
  return std::pow(s, 1.0 / p);
}

Scalar lp_norm(const Field& f, Scalar p) {
  if (!f.all_finite()) throw std::invalid_argument("non-finite field");
  return lp_norm(f.norms(), f.grid, p);
}

Scalar integral(const ArrayX& values, const GridSpec& g) {
  return values.sum() * g.cell_volume();
}

Field convolve(const Field& f, const Field& k) {
  if (f.grid != k.grid) throw std::invalid_argument("convolve: grid mismatch");
  if (k.target.m != 1) throw std::invalid_argument("convolve: kernel must be scalar");
  ConvolutionPlan plan(f);
  ArrayXc col = k.values.col(0);
  const ArrayXc khat = kernel_hat_from_samples(f.grid, col);
  Field out(f.grid, f.target);
  plan.apply(khat, out.values);
  return out;
}

Scalar integrate_time(const ArrayX& values, Scalar q, const LogTimeGrid& tgrid) {
  if (values.size() != tgrid.count)
    throw std::invalid_argument("integrate_time: one value per node required");
  if ((values < 0).any()) throw std::invalid_argument("integrate_time: negative input");
  if (!(q >= 1)) throw std::invalid_argument("invalid exponent");
  if (std::isinf(q)) return values.maxCoeff();
  return std::pow(values.pow(q).sum() * tgrid.weight(), 1.0 / q);
}

}  // namespace lps
