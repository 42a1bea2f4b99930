#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lps/fft.hpp"
#include "lps/kernels.hpp"
#include "lps/numgrid.hpp"
#include "lps/quadrature.hpp"
#include "lps/rng.hpp"

using namespace lps;

namespace {

// quadrature of an even function over the whole line, split at the scale knee
Scalar even_line_integral(const std::function<Scalar(Scalar)>& f, Scalar knee, Scalar far) {
  return 2 * (adaptive_simpson(f, 0.0, knee, 1e-13) +
              integrate_log_axis(f, knee, far, 1e-12).value);
}

}  // namespace

TEST_CASE("heat kernel closed form") {
  CHECK(heat_kernel(1.0, 0.0, 1) == doctest::Approx(std::pow(4 * kPi, -0.5)).epsilon(1e-14));
  CHECK(heat_kernel(0.7, 1.3, 1) == doctest::Approx(heat_kernel(0.7, -1.3, 1)));
  CHECK_THROWS(heat_kernel(0.0, 1.0, 1));
  const Scalar mass =
      even_line_integral([](Scalar x) { return heat_kernel(1.0, x, 1); }, 4.0, 60.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("poisson kernel closed form and unit mass") {
  // c_1 is fixed by unit mass; quadrature oracle determines it as 1/pi
  const Scalar mass =
      even_line_integral([](Scalar x) { return poisson_kernel(1.0, x, 1); }, 4.0, 1e9);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(poisson_kernel(1.0, 0.0, 1) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
  CHECK_THROWS(poisson_kernel(-1.0, 0.0, 1));
  // dilation structure p_t(x) = t^{-d} p_1(x/t)
  for (Scalar x : {0.0, 0.4, 2.0, 17.0})
    CHECK(poisson_kernel(2.0, x, 1) ==
          doctest::Approx(0.5 * poisson_kernel(1.0, x / 2, 1)).epsilon(1e-14));
  CHECK(poisson_kernel(2.0, 1.0, 2) ==
        doctest::Approx(0.25 * poisson_kernel(1.0, 0.5, 2)).epsilon(1e-14));
  // d=2 unit mass: 2 pi int_0^inf p_1(r) r dr
  const Scalar mass2 =
      2 * kPi *
      (adaptive_simpson([](Scalar r) { return r * poisson_kernel(1.0, r, 2); }, 0.0, 4.0, 1e-13) +
       integrate_log_axis([](Scalar r) { return r * poisson_kernel(1.0, r, 2); }, 4.0, 1e7, 1e-11)
           .value);
  CHECK(mass2 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("subordinated heat kernel reproduces the Poisson kernel") {
  SemigroupSpec heat = heat_semigroup(1);
  CHECK(subordinated_kernel(heat, 1.0, 0.0) == doctest::Approx(1.0 / kPi).epsilon(1e-6));
  for (Scalar t : {0.25, 1.0, 4.0})
    for (Scalar x : {0.0, 0.5, 3.0, 17.0, 64.0}) {
      const Scalar sub = subordinated_kernel(heat, t, x);
      const Scalar ref = poisson_kernel(t, x, 1);
      CHECK(std::abs(sub - ref) <= 1e-6 * std::max(ref, 1e-12));
    }
  // mass preserved through subordination
  SemigroupSpec heat2 = heat_semigroup(1);
  const Scalar mass = even_line_integral(
      [&](Scalar x) { return subordinated_kernel(heat2, 0.5, x); }, 4.0, 3e6);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS(subordinated_kernel(heat, -1.0, 0.0));
}

TEST_CASE("dt kernels: closed forms, composition value, zero mass") {
  SemigroupSpec poisson = poisson_semigroup(1);
  SemigroupSpec heat = heat_semigroup(1);
  // t d/dt of p_t(p_s) at t=s=1, x=0 equals -1/(4 pi); the composition kernel
  // at scale t+s carries the chain factor t/(t+s)
  const Scalar composed = dt_kernel(poisson, 2.0, 0.0) * (1.0 / 2.0);
  CHECK(composed == doctest::Approx(-1.0 / (4 * kPi)).epsilon(1e-12));
  CHECK(dt_kernel(heat, 1.0, 0.0) ==
        doctest::Approx(-0.5 * std::pow(4 * kPi, -0.5)).epsilon(1e-12));
  // cross-check against a log-t central difference
  const Scalar eta = 1e-5;
  for (Scalar x : {0.0, 0.7, 3.0}) {
    const Scalar fd =
        (heat.kernel(std::exp(eta), x, 0) - heat.kernel(std::exp(-eta), x, 0)) / (2 * eta);
    CHECK(dt_kernel(heat, 1.0, x) == doctest::Approx(fd).epsilon(1e-8));
  }
  for (Scalar t : {0.5, 1.0, 2.0}) {
    const Scalar m = 2 * (adaptive_simpson([&](Scalar x) { return dt_kernel(poisson, t, x); },
                                           0.0, 4 * t, 1e-13) +
                          integrate_log_axis(
                              [&](Scalar x) { return dt_kernel(poisson, t, x); }, 4 * t,
                              1e10, 1e-12, 1e-14)
                              .value);
    CHECK(std::abs(m) < 1e-8);
    const Scalar mh = 2 * adaptive_simpson([&](Scalar x) { return dt_kernel(heat, t, x); }, 0.0,
                                           30 * std::sqrt(t), 1e-13);
    CHECK(std::abs(mh) < 1e-10);
  }
}

TEST_CASE("translation Poisson semigroup: kernel vs multiplier") {
  SemigroupSpec tp = translation_poisson_semigroup();
  // one-sided kernel integrates to one
  const Scalar mass = integrate_log_axis(
                          [&](Scalar u) { return tp.kernel(1.0, -u, 0); }, 1e-12, 1e16, 1e-11)
                          .value;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  // inverse transform of the multiplier reproduces the spatial kernel
  GridSpec g(1, 64.0, 1 << 14);
  ArrayXc table(g.n);
  for (Index i = 0; i < g.n; ++i) table(i) = tp.multiplier(1.0, bin_frequency(g, i), 0);
  ArrayXc wrapped;
  fft_inverse(g, table, wrapped);
  wrapped /= g.spacing();
  Scalar worst = 0;
  for (Index i = 0; i < g.n; ++i) {
    const Scalar x = g.axis_offset(i);
    if (std::abs(x) < 0.05 || std::abs(x) > 30) continue;
    Scalar periodized = 0;  // the inverse DFT sees the 2L-periodization
    for (int im = -8; im <= 8; ++im)
      periodized += tp.kernel(1.0, x + 2 * g.half_width * im, 0);
    // images beyond +-8, by the midpoint integral of the u^{-3/2} tail
    periodized += 1.0 / (2 * g.half_width * std::sqrt(kPi * (8.5 * 2 * g.half_width - x)));
    worst = std::max(worst, std::abs(wrapped(i) - Complex(periodized, 0)));
  }
  CHECK(worst < 1e-5);
  // semigroup law of the multiplier
  for (Scalar xi : {0.5, -2.0})
    CHECK(std::abs(tp.multiplier(0.7, xi, 0) * tp.multiplier(1.1, xi, 0) -
                   tp.multiplier(1.8, xi, 0)) < 1e-14);
}

TEST_CASE("phi kernel: transform values, vanishing mean, decay") {
  // paper's branch: phihat(1) = -z e^{-z} with z = sqrt(2 pi) e^{-i pi/4}
  const Complex z = std::sqrt(2 * kPi) * std::exp(Complex(0, -kPi / 4));
  const Complex expected = -z * std::exp(-z);
  CHECK(std::abs(phi_hat(1.0) - expected) < 1e-14);
  CHECK(std::abs(phi_hat(-1.0) - std::conj(expected)) < 1e-14);
  CHECK(phi_hat(0.0) == Complex(0, 0));

  GridSpec coarse(1, 64.0, 1 << 12);
  CHECK_THROWS(phi_kernel(coarse));  // phihat far above 1e-12 at Nyquist

  GridSpec g(1, 32.0, 1 << 17);
  HolderKernel phi = phi_kernel(g);
  CHECK(phi.eps == doctest::Approx(0.5));
  CHECK(phi.delta == doctest::Approx(1.0));
  // vanishing transform at the origin forces zero mean
  Complex mass(0, 0);
  for (Index i = 0; i < g.size(); ++i) mass += phi.samples(i);
  CHECK(std::abs(mass) * g.spacing() < 1e-8);
  // kernel is real up to roundoff
  CHECK(phi.samples.imag().abs().maxCoeff() < 1e-10);

  Scalar decay = 0, decay_deriv = 0;
  const ArrayXc dphi = spectral_derivative(g, phi.samples);
  for (Index i = 0; i < g.size(); ++i) {
    const Scalar x = std::abs(g.x1(i));
    decay = std::max(decay, std::abs(phi.samples(i)) * std::pow(1 + x, 1.5));
    decay_deriv = std::max(decay_deriv, std::abs(dphi(i)) * std::pow(1 + x, 2.5));
  }
  CHECK(decay < 10.0);        // finite; the acceptance suite checks grid stability
  CHECK(decay_deriv < 200.0);
}

TEST_CASE("holder_check") {
  GridSpec g(1, 64.0, 1 << 12);
  HolderKernel zero;
  zero.grid = g;
  zero.samples = ArrayXc::Zero(g.size());
  zero.eps = 0.5;
  zero.delta = 1.0;
  const HolderReport zr = holder_check(zero);
  CHECK(zr.size_constant == 0.0);
  CHECK(zr.smoothness_constant == 0.0);
  CHECK(zr.mean_constant == 0.0);

  const HolderReport pr = holder_check(dt_poisson_holder_kernel(g));
  CHECK(pr.size_constant > 0);
  CHECK(pr.size_constant < 5);
  CHECK(pr.smoothness_constant > 0);
  CHECK(pr.smoothness_constant < 20);
  CHECK(pr.mean_constant < 1.0);  // truncation tail of the |x|^-2 decay over [-64, 64]

  GridSpec gp(1, 32.0, 1 << 17);
  const HolderReport fr = holder_check(phi_kernel(gp));
  CHECK(std::isfinite(fr.size_constant));
  CHECK(std::isfinite(fr.smoothness_constant));
  CHECK(fr.size_constant < 50);
  CHECK(fr.smoothness_constant < 200);
}

TEST_CASE("hormander_check: finite and refinement-stable for dt-Poisson") {
  LogTimeGrid tg(1e-4, 1e4, 400);
  GridSpec g1(1, 64.0, 1 << 12), g2(1, 64.0, 1 << 13);
  const HormanderReport a = hormander_check(dt_poisson_holder_kernel(g1), 2.0, tg);
  const HormanderReport b = hormander_check(dt_poisson_holder_kernel(g2), 2.0, tg);
  CHECK(a.size_sup > 0);
  CHECK(std::isfinite(a.size_sup));
  CHECK(std::isfinite(a.smoothness_sup));
  CHECK(std::abs(b.size_sup - a.size_sup) <= 0.10 * a.size_sup);
  CHECK(std::abs(b.smoothness_sup - a.smoothness_sup) <= 0.10 * a.smoothness_sup);

  HolderKernel zero;
  zero.grid = g1;
  zero.samples = ArrayXc::Zero(g1.size());
  const HormanderReport zr = hormander_check(zero, 2.0, tg, 16, 2);
  CHECK(zr.size_sup == 0.0);
  CHECK(zr.smoothness_sup == 0.0);
}

TEST_CASE("uchiyama decomposition of the dt-Poisson kernel") {
  GridSpec g(1, 256.0, 1 << 15);
  HolderKernel k = dt_poisson_holder_kernel(g);
  const UchiyamaDecomposition dec = uchiyama_decompose(k, 30);
  CHECK(dec.reconstruction_sup_error <= 1e-3);
  CHECK(dec.constant > 0);
  for (const auto& lv : dec.levels) {
    CHECK(lv.outside_unit_ball == 0.0);
    CHECK(lv.mean_abs <= 1e-6);
    CHECK(lv.holder_constant <= 1.0 + 1e-9);
  }
  // residual decreases roughly geometrically with the cut level
  const Scalar r5 = uchiyama_decompose(k, 5, 1.0).reconstruction_sup_error;
  const Scalar r7 = uchiyama_decompose(k, 7, 1.0).reconstruction_sup_error;
  const Scalar rate = std::pow(2.0, -k.eps) + 0.35;
  CHECK(r7 <= r5 * rate * rate);

  HolderKernel zero = k;
  zero.samples.setZero();
  zero.eval = nullptr;
  const UchiyamaDecomposition zd = uchiyama_decompose(zero, 6);
  CHECK(zd.constant == 0.0);
  for (const auto& lv : zd.levels) CHECK(lv.psi.abs().maxCoeff() == 0.0);
}

TEST_CASE("calderon pairing") {
  GridSpec g(1, 64.0, 1 << 12);
  HolderKernel phi0 = dt_poisson_holder_kernel(g);
  HolderKernel four_phi0 = phi0;
  four_phi0.samples *= 4.0;
  four_phi0.eval = [&](Scalar x, Scalar y) { return 4.0 * phi0.eval(x, y); };
  four_phi0.fourier = [&](Scalar x, Scalar y) { return 4.0 * phi0.fourier(x, y); };

  ArrayX xis(64);
  for (int i = 0; i < 64; ++i) xis(i) = (i % 2 ? -1 : 1) * std::pow(2.0, -6.0 + 12.0 * i / 63.0);
  LogTimeGrid tg(1e-9, 1e4, 624);
  const Scalar dev = calderon_check(four_phi0, phi0, xis, tg);
  CHECK(dev <= 1e-6);

  // scaling by lambda moves the integral to lambda
  HolderKernel lam = phi0;
  lam.samples *= 8.0;
  lam.fourier = [&](Scalar x, Scalar y) { return 8.0 * phi0.fourier(x, y); };
  const Scalar dev_lam = calderon_check(lam, phi0, xis, tg);
  CHECK(dev_lam == doctest::Approx(8.0 * 0.25 - 1.0).epsilon(1e-5));

  // degenerate kernel: transform supported on the positive ray only
  HolderKernel degen = phi0;
  degen.fourier = [](Scalar xi, Scalar) {
    return xi > 0 ? Complex(-2 * kPi * xi * std::exp(-2 * kPi * xi), 0) : Complex(0, 0);
  };
  const Scalar dev_degen = calderon_check(degen, degen, xis, tg);
  CHECK(dev_degen >= 0.99);  // the missing ray is reported, not masked

  LogTimeGrid narrow(0.5, 2.0, 50);
  CHECK_THROWS(calderon_check(four_phi0, phi0, xis, narrow));
}

TEST_CASE("kernel csv dump") {
  GridSpec g(1, 4.0, 32);
  HolderKernel k = dt_poisson_holder_kernel(g);
  const std::string csv = dump_kernel_csv(k, 2.0);
  CHECK(csv.rfind("x,value_re,value_im\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 33);  // header + 32 rows
}
