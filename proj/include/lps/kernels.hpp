// Convolution kernels of the implemented semigroups (heat, classical Poisson,
// subordinated translation Poisson, custom Fourier multipliers) together with
// the structural checks performed on Holder-class kernels: size/smoothness
// constants, vector-kernel Hormander regularity, Uchiyama decomposition into
// unit-ball atoms, and the Calderon reproducing pairing.
#pragma once

#include "lps/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lps {

// ---------------------------------------------------------------------------
// Closed-form kernels. r is the Euclidean norm of the space argument.

Scalar heat_kernel(Scalar t, Scalar r, int d);
// t * d/dt of the heat kernel.
Scalar dt_heat_kernel(Scalar t, Scalar r, int d);

// Unit-mass normalization constant c_d = Gamma((d+1)/2) / pi^((d+1)/2).
Scalar poisson_mass_constant(int d);
Scalar poisson_kernel(Scalar t, Scalar r, int d);
Scalar dt_poisson_kernel(Scalar t, Scalar r, int d);

// ---------------------------------------------------------------------------
// Computable semigroups. Kernels use the ordinary convolution orientation
// T_t f(x) = int kernel(t, x - y) f(y) dy; multipliers are Fourier transforms
// of the kernels under the convention  fhat(xi) = int f(x) e^{-2 pi i x.xi} dx.
struct SemigroupSpec {
  enum class Kind { Heat, PoissonClassical, TranslationPoisson, CustomMultiplier };

  Kind kind = Kind::Heat;
  int d = 1;
  std::string name;
  std::function<Scalar(Scalar t, Scalar x1, Scalar x2)> kernel;
  std::function<Scalar(Scalar t, Scalar x1, Scalar x2)> dt_kernel;  // t d/dt kernel
  std::function<Complex(Scalar t, Scalar xi1, Scalar xi2)> multiplier;
  std::function<Complex(Scalar t, Scalar xi1, Scalar xi2)> dt_multiplier;
  Scalar dt_log_step = 1e-4;  // relative step for finite differences in log t
};

SemigroupSpec heat_semigroup(int d);
SemigroupSpec poisson_semigroup(int d);
// Poisson semigroup subordinated to the translation group of R (d = 1).
SemigroupSpec translation_poisson_semigroup();
SemigroupSpec custom_multiplier_semigroup(
    std::function<Complex(Scalar t, Scalar xi1, Scalar xi2)> multiplier, int d,
    std::string name = "custom");

// Subordination integral (1/sqrt(pi)) int_0^inf e^{-s}/sqrt(s) K(t^2/4s, x) ds
// evaluated by log-substituted trapezoid quadrature with refinement doubling.
// Throws if successive refinements fail to agree to tolerance.
Scalar subordinated_kernel(const SemigroupSpec& sg, Scalar t, Scalar x1, Scalar x2 = 0,
                           Scalar tol = 1e-8);

// t d/dt of the semigroup kernel: closed form when available, otherwise a
// central difference in log t.
Scalar dt_kernel(const SemigroupSpec& sg, Scalar t, Scalar x1, Scalar x2 = 0);

// ---------------------------------------------------------------------------
// Kernels of declared Holder class (size/smoothness exponents eps, delta).
struct HolderKernel {
  GridSpec grid;  // m = 1 sampling grid
  ArrayXc samples;
  Scalar eps = 1.0;
  Scalar delta = 1.0;
  std::string name;
  std::function<Complex(Scalar x1, Scalar x2)> eval;     // optional closed form
  std::function<Complex(Scalar xi1, Scalar xi2)> fourier;  // optional closed-form FT

  // Pointwise value: closed form if present, else multilinear interpolation of
  // the samples (zero outside the sampled window).
  Complex value(Scalar x1, Scalar x2 = 0) const;
  // Fourier transform at an arbitrary frequency: closed form if present, else
  // a direct discrete transform of the samples.
  Complex fourier_at(Scalar xi1, Scalar xi2 = 0) const;

  Field as_field() const {
    ArrayXXc v(samples.size(), 1);
    v.col(0) = samples;
    return Field(grid, VectorTarget(2.0, 1), std::move(v));
  }
};

// Kernel built from a closed-form evaluator sampled on a grid.
HolderKernel make_holder_kernel(const GridSpec& grid, Scalar eps, Scalar delta,
                                std::function<Complex(Scalar, Scalar)> eval,
                                std::function<Complex(Scalar, Scalar)> fourier = nullptr,
                                std::string name = "kernel");

// t d/dt Poisson kernel at t = 1 as a Holder kernel with (eps, delta) = (1, 1).
HolderKernel dt_poisson_holder_kernel(const GridSpec& grid);

// Fourier transform of the translation-Poisson convolution kernel phi,
// phihat(xi) = -sqrt(-2 pi i xi) exp(-sqrt(-2 pi i xi)) on the principal branch.
Complex phi_hat(Scalar xi);

// The kernel phi with the above transform, sampled by inverse FFT on a d = 1
// grid; class parameters (1/2, 1). Throws if phihat has not decayed below
// 1e-12 at the Nyquist frequency.
HolderKernel phi_kernel(const GridSpec& grid);

// Spectral derivative of a sampled kernel (multiplication by 2 pi i xi).
ArrayXc spectral_derivative(const GridSpec& grid, const ArrayXc& samples);

// ---------------------------------------------------------------------------
// Structural checks (report-valued).

struct HolderReport {
  Scalar size_constant = 0;        // sup |phi(x)| (1+|x|)^{d+eps}
  Scalar smoothness_constant = 0;  // sup pair ratio against the matched Holder bound
  Scalar mean_constant = 0;        // |discrete integral of phi| / h
};

HolderReport holder_check(const HolderKernel& k, Index pair_samples = 20000,
                          std::uint64_t seed = 1);

struct HormanderReport {
  Scalar size_sup = 0;        // sup_x ||K(x)||_{L_q(R_+)} |x|^d
  Scalar smoothness_sup = 0;  // sup_{|x|>2|y|} ||K(x+y)-K(x)||_{L_q} |x|^{d+delta} / |y|^delta
};

HormanderReport hormander_check(const HolderKernel& k, Scalar q, const LogTimeGrid& tgrid,
                                Index x_samples = 64, Index shift_samples = 8,
                                std::uint64_t seed = 1);

struct UchiyamaLevel {
  int level = 0;
  ArrayXc psi;               // unit-scale atom samples on the kernel grid
  Scalar mean_abs = 0;       // |discrete integral of psi|
  Scalar outside_unit_ball = 0;  // sup |psi| outside B(0, 1 + h)
  Scalar holder_constant = 0;
};

struct UchiyamaDecomposition {
  Scalar constant = 0;  // C with phi = C sum_k 2^{-eps k} (psi^(k))_{2^k}
  std::vector<UchiyamaLevel> levels;
  Scalar reconstruction_sup_error = 0;
};

// Smooth dyadic partition used by the decomposition: eta supported in
// (1/2, 2) with sum_k eta(2^{-k} r) = 1 for r > 0.
Scalar dyadic_bump(Scalar r);

UchiyamaDecomposition uchiyama_decompose(const HolderKernel& k, int kmax,
                                         Scalar tail_tol = 1e-3,
                                         Index pair_samples = 4000,
                                         std::uint64_t seed = 1);

// Maximum over the sampled frequencies of |int phihat(t xi) psihat(t xi) dt/t - 1|.
// Throws if the integrand has not decayed to tolerance at the ends of tgrid.
Scalar calderon_check(const HolderKernel& phi, const HolderKernel& psi,
                      const ArrayX& xi_samples, const LogTimeGrid& tgrid,
                      Scalar tail_tol = 1e-9);

// CSV dump (x..., value_re, value_im) of the dilated kernel at scale t.
std::string dump_kernel_csv(const HolderKernel& k, Scalar t);

}  // namespace lps
