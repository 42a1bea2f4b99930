// Thin FFT layer over Eigen's FFT module: d-dimensional transforms on the
// flat field layout plus frequency bookkeeping for convolution multipliers.
#pragma once

#include "lps/types.hpp"

namespace lps {

// DFT bin -> continuous frequency in cycles per unit length. Bin m of an
// N-point transform over spacing h corresponds to xi = m_signed / (N h).
inline Scalar bin_frequency(const GridSpec& g, Index bin) {
  const Index m = bin <= g.n / 2 - 1 ? bin : bin - g.n;
  return static_cast<Scalar>(m) / (2 * g.half_width);
}

// Unnormalized forward transform of a flat array (d=1 or d=2 layout).
void fft_forward(const GridSpec& g, const ArrayXc& in, ArrayXc& out);
// Inverse transform, normalized by 1/N^d.
void fft_inverse(const GridSpec& g, const ArrayXc& in, ArrayXc& out);

// Rotate a natural-layout kernel sample array so that index 0 carries the
// spatial argument 0 (no-op for zero-based grids).
ArrayXc wrap_kernel(const GridSpec& g, const ArrayXc& natural);

// Continuous Fourier transform of a sampled kernel at the DFT bins:
// h^d * DFT(wrapped samples). Exact for band-limited kernels.
ArrayXc kernel_hat_from_samples(const GridSpec& g, const ArrayXc& natural);

// Evaluate a closed-form multiplier at every DFT bin.
ArrayXc multiplier_table(const GridSpec& g,
                         const std::function<Complex(Scalar, Scalar)>& mult);

// Caches the transform of a field so that many kernels can be applied to it.
class ConvolutionPlan {
 public:
  explicit ConvolutionPlan(const Field& f);

  const GridSpec& grid() const { return grid_; }
  Index columns() const { return fhat_.cols(); }

  // out = IFFT(fhat .* khat), one column per target coordinate.
  void apply(const ArrayXc& khat, ArrayXXc& out) const;

 private:
  GridSpec grid_;
  ArrayXXc fhat_;
};

}  // namespace lps
