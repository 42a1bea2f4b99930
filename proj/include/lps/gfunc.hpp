// Square-function operators: the convolution g-function G_{q,phi}, semigroup
// g-functions, the Lusin area function, lacunary difference sums, intrinsic
// square functions, the dyadic maximal function, the weighted comparison and
// empirical best-constant estimation.
#pragma once

#include "lps/kernels.hpp"
#include "lps/types.hpp"

#include <string>
#include <vector>

namespace lps {

struct GFunctionResult {
  GridSpec grid;
  Scalar q = 2;
  LogTimeGrid tgrid;
  ArrayX values;                 // pointwise nonnegative g-function
  Scalar tail_fraction_low = 0;  // first-decade share of the q-energy
  Scalar tail_fraction_high = 0;
  bool flagged = false;

  Field as_field() const {
    ArrayXXc v(values.size(), 1);
    v.col(0) = values.cast<Complex>();
    return Field(grid, VectorTarget(2.0, 1), std::move(v));
  }
};

Scalar lp_norm(const GFunctionResult& g, Scalar p);

// Continuous Fourier transform of the dilated kernel phi_t at the grid bins;
// prefers the closed-form transform, then the closed-form evaluator, then
// interpolation of the samples.
ArrayXc dilated_kernel_hat(const HolderKernel& phi, const GridSpec& g, Scalar t);

// Transform of the semigroup kernel / its t d/dt kernel at scale t.
ArrayXc semigroup_kernel_hat(const SemigroupSpec& sg, const GridSpec& g, Scalar t);
ArrayXc semigroup_dt_kernel_hat(const SemigroupSpec& sg, const GridSpec& g, Scalar t);

// G_{q,phi}(f)(x) = (int ||phi_t * f(x)||_X^q dt/t)^{1/q} over tgrid.
GFunctionResult g_conv(const Field& f, const HolderKernel& phi, Scalar q,
                       const LogTimeGrid& tgrid, Scalar tail_tol = 1e-3);

// Semigroup g-function with t d/dt kernels.
GFunctionResult g_semigroup(const Field& f, const SemigroupSpec& sg, Scalar q,
                            const LogTimeGrid& tgrid, Scalar tail_tol = 1e-3);

// Lusin area function: cone-averaged variant over |y - x| < t.
GFunctionResult lusin_area(const Field& f, const HolderKernel& phi, Scalar q,
                           const LogTimeGrid& tgrid, Scalar tail_tol = 1e-3);

struct LacunaryResult {
  GridSpec grid;
  ArrayX values;
  bool flagged = false;  // set when the end terms still carry weight
};

// (sum_k ||(P_{a^k t0} - P_{a^{k+1} t0}) f||_X^q)^{1/q} for k in [kmin, kmax].
LacunaryResult lacunary_diff(const Field& f, const SemigroupSpec& sg, Scalar a, Scalar t0,
                             Scalar q, int kmin, int kmax, Scalar tail_tol = 1e-6);

// Dictionary approximation of Wilson's intrinsic square function: the
// pointwise sup over the dictionary before time integration. A lower bound
// for the true supremum over the whole Holder class.
GFunctionResult intrinsic_g(const Field& f, Scalar eps, Scalar delta, Scalar q,
                            const LogTimeGrid& tgrid, const std::vector<HolderKernel>& dictionary,
                            Scalar class_slack = 1e-9);

// Hardy-Littlewood maximal function over cubes centered at the evaluation
// point with dyadic side lengths 2^j h (periodic averages).
Field maximal(const Field& w);

struct WeightedPair {
  Scalar lhs = 0;  // (int S_{q,phi}(f)^q w)^{1/q}
  Scalar rhs = 0;  // (int ||f||_X^q M(w))^{1/q}
};

WeightedPair weighted_check(const Field& f, const Field& w, const HolderKernel& phi, Scalar q,
                            const LogTimeGrid& tgrid);

// ---------------------------------------------------------------------------
// Empirical best-constant estimation

enum class FamilyKind { PoissonScales, HeatScales, GaussianBumps, DyadicSteps, TrigPolynomials };

std::string family_name(FamilyKind kind);

struct TestFamily {
  std::string name;
  std::vector<Field> members;
  std::vector<std::string> labels;
};

TestFamily make_family(FamilyKind kind, const GridSpec& grid, const VectorTarget& target,
                       Index count, std::uint64_t seed);

// The twelve-member suite used by the domination and equivalence experiments.
TestFamily standard_suite(const GridSpec& grid, std::uint64_t seed);

struct ConstantEstimate {
  Scalar p = 2, q = 2;
  Scalar r = 2;
  Index m = 1;
  std::string family;
  Scalar estimate = 0;  // max over the family of ||G f||_p / ||f||_p
  std::string argmax_label;
  Index samples_used = 0;
  Index skipped = 0;
  std::uint64_t seed = 0;
  // grid metadata
  int d = 1;
  Scalar half_width = 0;
  Index n = 0;
  Scalar t_min = 0, t_max = 0;
  Index t_count = 0;
};

ConstantEstimate estimate_constant(const TestFamily& family, const SemigroupSpec& sg, Scalar p,
                                   Scalar q, const LogTimeGrid& tgrid, std::uint64_t seed);
ConstantEstimate estimate_constant(const TestFamily& family, const HolderKernel& phi, Scalar p,
                                   Scalar q, const LogTimeGrid& tgrid, std::uint64_t seed);

}  // namespace lps
