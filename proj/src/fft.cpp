#include "lps/fft.hpp"

#include <unsupported/Eigen/FFT>

#include <vector>

namespace lps {

namespace {

Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> fft;
  return fft;
}

void fft_1d(Eigen::VectorXcd& buf, bool forward) {
  Eigen::VectorXcd tmp(buf.size());
  if (forward)
    fft_engine().fwd(tmp, buf);
  else
    fft_engine().inv(tmp, buf);
  buf.swap(tmp);
}

}  // namespace

void fft_forward(const GridSpec& g, const ArrayXc& in, ArrayXc& out) {
  if (in.size() != g.size()) throw std::invalid_argument("fft: size mismatch");
  if (g.d == 1) {
    Eigen::VectorXcd buf = in.matrix();
    fft_1d(buf, true);
    out = buf.array();
    return;
  }
  const Index n = g.n;
  out.resize(n * n);
  Eigen::VectorXcd buf(n);
  for (Index ix = 0; ix < n; ++ix) {  // contiguous y-lines
    buf = in.segment(ix * n, n).matrix();
    fft_1d(buf, true);
    out.segment(ix * n, n) = buf.array();
  }
  for (Index iy = 0; iy < n; ++iy) {  // strided x-lines
    for (Index ix = 0; ix < n; ++ix) buf(ix) = out(ix * n + iy);
    fft_1d(buf, true);
    for (Index ix = 0; ix < n; ++ix) out(ix * n + iy) = buf(ix);
  }
}

void fft_inverse(const GridSpec& g, const ArrayXc& in, ArrayXc& out) {
  if (in.size() != g.size()) throw std::invalid_argument("fft: size mismatch");
  if (g.d == 1) {
    Eigen::VectorXcd buf = in.matrix();
    fft_1d(buf, false);
    out = buf.array();
    return;
  }
  const Index n = g.n;
  out.resize(n * n);
  Eigen::VectorXcd buf(n);
  for (Index ix = 0; ix < n; ++ix) {
    buf = in.segment(ix * n, n).matrix();
    fft_1d(buf, false);
    out.segment(ix * n, n) = buf.array();
  }
  for (Index iy = 0; iy < n; ++iy) {
    for (Index ix = 0; ix < n; ++ix) buf(ix) = out(ix * n + iy);
    fft_1d(buf, false);
    for (Index ix = 0; ix < n; ++ix) out(ix * n + iy) = buf(ix);
  }
}

ArrayXc wrap_kernel(const GridSpec& g, const ArrayXc& natural) {
  if (natural.size() != g.size()) throw std::invalid_argument("wrap_kernel: size mismatch");
  if (g.origin == GridOrigin::ZeroBased) return natural;
  const Index n = g.n, half = n / 2;
  ArrayXc out(natural.size());
  if (g.d == 1) {
    for (Index i = 0; i < n; ++i) out(i) = natural((i + half) % n);
  } else {
    for (Index ix = 0; ix < n; ++ix)
      for (Index iy = 0; iy < n; ++iy)
        out(ix * n + iy) = natural(((ix + half) % n) * n + (iy + half) % n);
  }
  return out;
}

ArrayXc kernel_hat_from_samples(const GridSpec& g, const ArrayXc& natural) {
  ArrayXc wrapped = wrap_kernel(g, natural);
  ArrayXc hat;
  fft_forward(g, wrapped, hat);
  hat *= g.cell_volume();
  return hat;
}

ArrayXc multiplier_table(const GridSpec& g,
                         const std::function<Complex(Scalar, Scalar)>& mult) {
  ArrayXc out(g.size());
  if (g.d == 1) {
    for (Index i = 0; i < g.n; ++i) out(i) = mult(bin_frequency(g, i), 0.0);
  } else {
    for (Index ix = 0; ix < g.n; ++ix) {
      const Scalar fx = bin_frequency(g, ix);
      for (Index iy = 0; iy < g.n; ++iy) out(ix * g.n + iy) = mult(fx, bin_frequency(g, iy));
    }
  }
  return out;
}

ConvolutionPlan::ConvolutionPlan(const Field& f) : grid_(f.grid) {
  fhat_.resize(f.values.rows(), f.values.cols());
  ArrayXc col, hat;
  for (Index c = 0; c < f.values.cols(); ++c) {
    col = f.values.col(c);
    fft_forward(grid_, col, hat);
    fhat_.col(c) = hat;
  }
}

void ConvolutionPlan::apply(const ArrayXc& khat, ArrayXXc& out) const {
  out.resize(fhat_.rows(), fhat_.cols());
  ArrayXc prod, res;
  for (Index c = 0; c < fhat_.cols(); ++c) {
    prod = fhat_.col(c) * khat;
    fft_inverse(grid_, prod, res);
    out.col(c) = res;
  }
}

}  // namespace lps
