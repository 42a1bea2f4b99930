#include "lps/kernels.hpp"

#include "lps/fft.hpp"
#include "lps/numgrid.hpp"
#include "lps/quadrature.hpp"
#include "lps/rng.hpp"

#include <algorithm>
#include <sstream>

namespace lps {

// ---------------------------------------------------------------------------
// Closed-form kernels

Scalar heat_kernel(Scalar t, Scalar r, int d) {
  if (!(t > 0)) throw std::invalid_argument("heat_kernel: t must be positive");
  return std::pow(4 * kPi * t, -0.5 * d) * std::exp(-r * r / (4 * t));
}

Scalar dt_heat_kernel(Scalar t, Scalar r, int d) {
  if (!(t > 0)) throw std::invalid_argument("dt_heat_kernel: t must be positive");
  return heat_kernel(t, r, d) * (-0.5 * d + r * r / (4 * t));
}

Scalar poisson_mass_constant(int d) {
  return std::tgamma(0.5 * (d + 1)) / std::pow(kPi, 0.5 * (d + 1));
}

Scalar poisson_kernel(Scalar t, Scalar r, int d) {
  if (!(t > 0)) throw std::invalid_argument("poisson_kernel: t must be positive");
  return poisson_mass_constant(d) * t / std::pow(r * r + t * t, 0.5 * (d + 1));
}

Scalar dt_poisson_kernel(Scalar t, Scalar r, int d) {
  if (!(t > 0)) throw std::invalid_argument("dt_poisson_kernel: t must be positive");
  const Scalar s = r * r + t * t;
  return poisson_mass_constant(d) * t * (r * r - d * t * t) / std::pow(s, 0.5 * (d + 3));
}

// ---------------------------------------------------------------------------
// Semigroup factories

SemigroupSpec heat_semigroup(int d) {
  SemigroupSpec sg;
  sg.kind = SemigroupSpec::Kind::Heat;
  sg.d = d;
  sg.name = "heat";
  sg.kernel = [d](Scalar t, Scalar x, Scalar y) { return heat_kernel(t, std::hypot(x, y), d); };
  sg.dt_kernel = [d](Scalar t, Scalar x, Scalar y) {
    return dt_heat_kernel(t, std::hypot(x, y), d);
  };
  sg.multiplier = [](Scalar t, Scalar xi1, Scalar xi2) {
    const Scalar w = 4 * kPi * kPi * (xi1 * xi1 + xi2 * xi2);
    return Complex(std::exp(-t * w), 0);
  };
  sg.dt_multiplier = [](Scalar t, Scalar xi1, Scalar xi2) {
    const Scalar w = 4 * kPi * kPi * (xi1 * xi1 + xi2 * xi2);
    return Complex(-t * w * std::exp(-t * w), 0);
  };
  return sg;
}

SemigroupSpec poisson_semigroup(int d) {
  SemigroupSpec sg;
  sg.kind = SemigroupSpec::Kind::PoissonClassical;
  sg.d = d;
  sg.name = "poisson";
  sg.kernel = [d](Scalar t, Scalar x, Scalar y) {
    return poisson_kernel(t, std::hypot(x, y), d);
  };
  sg.dt_kernel = [d](Scalar t, Scalar x, Scalar y) {
    return dt_poisson_kernel(t, std::hypot(x, y), d);
  };
  sg.multiplier = [](Scalar t, Scalar xi1, Scalar xi2) {
    const Scalar w = 2 * kPi * std::hypot(xi1, xi2);
    return Complex(std::exp(-t * w), 0);
  };
  sg.dt_multiplier = [](Scalar t, Scalar xi1, Scalar xi2) {
    const Scalar w = 2 * kPi * std::hypot(xi1, xi2);
    return Complex(-t * w * std::exp(-t * w), 0);
  };
  return sg;
}

namespace {

// principal branch of sqrt(-2 pi i xi), real part positive for xi != 0
Complex sqrt_minus_2pii(Scalar xi) {
  const Scalar mod = std::sqrt(2 * kPi * std::abs(xi));
  const Scalar sgn = xi >= 0 ? 1.0 : -1.0;
  const Scalar c = std::cos(kPi / 4), s = std::sin(kPi / 4);
  return Complex(mod * c, -sgn * mod * s);
}

// one-sided stable-1/2 density: P^tau_t f(x) = int_0^inf nu_t(u) f(x+u) du
Scalar stable_half_density(Scalar t, Scalar u) {
  if (u <= 0) return 0;
  return t / (2 * std::sqrt(kPi)) * std::pow(u, -1.5) * std::exp(-t * t / (4 * u));
}

}  // namespace

SemigroupSpec translation_poisson_semigroup() {
  SemigroupSpec sg;
  sg.kind = SemigroupSpec::Kind::TranslationPoisson;
  sg.d = 1;
  sg.name = "translation-poisson";
  // convolution orientation: kernel(v) = nu_t(-v), supported on v < 0
  sg.kernel = [](Scalar t, Scalar x, Scalar) { return stable_half_density(t, -x); };
  sg.dt_kernel = [](Scalar t, Scalar x, Scalar) {
    const Scalar u = -x;
    if (u <= 0) return 0.0;
    return stable_half_density(t, u) * (1 - t * t / (2 * u));
  };
  sg.multiplier = [](Scalar t, Scalar xi, Scalar) { return std::exp(-t * sqrt_minus_2pii(xi)); };
  sg.dt_multiplier = [](Scalar t, Scalar xi, Scalar) {
    const Complex z = sqrt_minus_2pii(xi);
    return -t * z * std::exp(-t * z);
  };
  return sg;
}

SemigroupSpec custom_multiplier_semigroup(
    std::function<Complex(Scalar, Scalar, Scalar)> multiplier, int d, std::string name) {
  SemigroupSpec sg;
  sg.kind = SemigroupSpec::Kind::CustomMultiplier;
  sg.d = d;
  sg.name = std::move(name);
  sg.multiplier = std::move(multiplier);
  return sg;
}

Scalar subordinated_kernel(const SemigroupSpec& sg, Scalar t, Scalar x1, Scalar x2, Scalar tol) {
  if (!(t > 0)) throw std::invalid_argument("subordinated_kernel: t must be positive");
  if (!sg.kernel) throw std::invalid_argument("subordinated_kernel: semigroup has no kernel");
  // s = e^u; e^{-s}/sqrt(s) ds = e^{-s} sqrt(s) du
  auto integrand = [&](Scalar u) {
    const Scalar s = std::exp(u);
    return std::exp(-s) * std::sqrt(s) * sg.kernel(t * t / (4 * s), x1, x2);
  };
  const QuadratureResult res =
      trapezoid_refine(integrand, -54.0, 7.0, tol, 1e-300, 14, 257);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "subordination quadrature did not converge (last refinement change "
        << res.error_estimate << ")";
    throw std::runtime_error(msg.str());
  }
  return res.value / std::sqrt(kPi);
}

Scalar dt_kernel(const SemigroupSpec& sg, Scalar t, Scalar x1, Scalar x2) {
  if (!(t > 0)) throw std::invalid_argument("dt_kernel: t must be positive");
  if (sg.dt_kernel) return sg.dt_kernel(t, x1, x2);
  if (!sg.kernel) throw std::invalid_argument("dt_kernel: semigroup has no spatial kernel");
  const Scalar eta = sg.dt_log_step;
  return (sg.kernel(t * std::exp(eta), x1, x2) - sg.kernel(t * std::exp(-eta), x1, x2)) /
         (2 * eta);
}

// ---------------------------------------------------------------------------
// Holder kernels

Complex HolderKernel::value(Scalar x1, Scalar x2) const {
  if (eval) return eval(x1, x2);
  const Scalar h = grid.spacing();
  const Scalar lo = grid.axis_coord(0);
  auto axis = [&](Scalar x, Index& i0, Scalar& w) -> bool {
    const Scalar s = (x - lo) / h;
    if (s < 0 || s > static_cast<Scalar>(grid.n - 1)) return false;
    i0 = std::min<Index>(static_cast<Index>(s), grid.n - 2);
    w = s - static_cast<Scalar>(i0);
    return true;
  };
  Index i0;
  Scalar wx;
  if (!axis(x1, i0, wx)) return Complex(0, 0);
  if (grid.d == 1) return (1 - wx) * samples(i0) + wx * samples(i0 + 1);
  Index j0;
  Scalar wy;
  if (!axis(x2, j0, wy)) return Complex(0, 0);
  const Index n = grid.n;
  return (1 - wx) * ((1 - wy) * samples(i0 * n + j0) + wy * samples(i0 * n + j0 + 1)) +
         wx * ((1 - wy) * samples((i0 + 1) * n + j0) + wy * samples((i0 + 1) * n + j0 + 1));
}

Complex HolderKernel::fourier_at(Scalar xi1, Scalar xi2) const {
  if (fourier) return fourier(xi1, xi2);
  const Scalar h = grid.spacing();
  Complex sum(0, 0);
  if (grid.d == 1) {
    const Complex step = std::exp(Complex(0, -2 * kPi * h * xi1));
    Complex phase = std::exp(Complex(0, -2 * kPi * grid.axis_coord(0) * xi1));
    for (Index i = 0; i < grid.n; ++i) {
      sum += samples(i) * phase;
      phase *= step;
    }
    return sum * h;
  }
  for (Index i = 0; i < grid.size(); ++i) {
    const Scalar ph = grid.x1(i) * xi1 + grid.x2(i) * xi2;
    sum += samples(i) * std::exp(Complex(0, -2 * kPi * ph));
  }
  return sum * h * h;
}

HolderKernel make_holder_kernel(const GridSpec& grid, Scalar eps, Scalar delta,
                                std::function<Complex(Scalar, Scalar)> eval,
                                std::function<Complex(Scalar, Scalar)> fourier,
                                std::string name) {
  HolderKernel k;
  k.grid = grid;
  k.eps = eps;
  k.delta = delta;
  k.name = std::move(name);
  k.eval = std::move(eval);
  k.fourier = std::move(fourier);
  k.samples.resize(grid.size());
  for (Index i = 0; i < grid.size(); ++i) k.samples(i) = k.eval(grid.x1(i), grid.x2(i));
  return k;
}

HolderKernel dt_poisson_holder_kernel(const GridSpec& grid) {
  const int d = grid.d;
  return make_holder_kernel(
      grid, 1.0, 1.0,
      [d](Scalar x, Scalar y) { return Complex(dt_poisson_kernel(1.0, std::hypot(x, y), d), 0); },
      [](Scalar xi1, Scalar xi2) {
        const Scalar w = 2 * kPi * std::hypot(xi1, xi2);
        return Complex(-w * std::exp(-w), 0);
      },
      "dt-poisson");
}

Complex phi_hat(Scalar xi) {
  if (xi == 0) return Complex(0, 0);
  const Complex z = sqrt_minus_2pii(xi);
  return -z * std::exp(-z);
}

HolderKernel phi_kernel(const GridSpec& grid) {
  if (grid.d != 1) throw std::invalid_argument("phi_kernel: d = 1 only");
  if (grid.origin != GridOrigin::Centered)
    throw std::invalid_argument("phi_kernel: centered grid required");
  const Scalar nyquist = static_cast<Scalar>(grid.n) / (4 * grid.half_width);
  if (std::abs(phi_hat(nyquist)) > 1e-12)
    throw std::invalid_argument(
        "phi_kernel: insufficient grid resolution (phihat above 1e-12 at Nyquist)");
  ArrayXc table(grid.n);
  for (Index i = 0; i < grid.n; ++i) table(i) = phi_hat(bin_frequency(grid, i));
  ArrayXc wrapped;
  fft_inverse(grid, table, wrapped);
  wrapped /= grid.spacing();
  HolderKernel k;
  k.grid = grid;
  k.eps = 0.5;
  k.delta = 1.0;
  k.name = "phi";
  k.samples = wrap_kernel(grid, wrapped);  // shift by N/2 is self-inverse
  k.fourier = [](Scalar xi, Scalar) { return phi_hat(xi); };
  return k;
}

ArrayXc spectral_derivative(const GridSpec& grid, const ArrayXc& samples) {
  ArrayXc hat = kernel_hat_from_samples(grid, samples);
  if (grid.d == 1) {
    for (Index i = 0; i < grid.n; ++i) hat(i) *= Complex(0, 2 * kPi * bin_frequency(grid, i));
  } else {
    throw std::invalid_argument("spectral_derivative: d = 1 only");
  }
  ArrayXc wrapped;
  fft_inverse(grid, hat, wrapped);
  wrapped /= grid.cell_volume();
  return wrap_kernel(grid, wrapped);
}

// ---------------------------------------------------------------------------
// Checks

HolderReport holder_check(const HolderKernel& k, Index pair_samples, std::uint64_t seed) {
  HolderReport rep;
  const GridSpec& g = k.grid;
  const Scalar dexp = static_cast<Scalar>(g.d);
  ArrayX radii(g.size());
  for (Index i = 0; i < g.size(); ++i) radii(i) = std::hypot(g.x1(i), g.x2(i));
  for (Index i = 0; i < g.size(); ++i)
    rep.size_constant = std::max(
        rep.size_constant, std::abs(k.samples(i)) * std::pow(1 + radii(i), dexp + k.eps));

  auto pair_ratio = [&](Index i, Index j) {
    if (i == j) return 0.0;
    const Scalar dx = std::hypot(g.x1(i) - g.x1(j), g.x2(i) - g.x2(j));
    const Scalar bound = std::pow(dx, k.delta) *
                         (std::pow(1 + radii(i), -dexp - k.eps - k.delta) +
                          std::pow(1 + radii(j), -dexp - k.eps - k.delta));
    return bound > 0 ? std::abs(k.samples(i) - k.samples(j)) / bound : 0.0;
  };
  Rng rng(seed);
  for (Index s = 0; s < pair_samples; ++s)
    rep.smoothness_constant =
        std::max(rep.smoothness_constant,
                 pair_ratio(rng.uniform_index(g.size()), rng.uniform_index(g.size())));
  for (Index i = 0; i + 1 < g.size(); ++i)  // adjacent pairs probe the local modulus
    rep.smoothness_constant = std::max(rep.smoothness_constant, pair_ratio(i, i + 1));

  Complex mass(0, 0);
  for (Index i = 0; i < g.size(); ++i) mass += k.samples(i);
  rep.mean_constant = std::abs(mass) * g.cell_volume() / g.spacing();
  return rep;
}

HormanderReport hormander_check(const HolderKernel& k, Scalar q, const LogTimeGrid& tgrid,
                                Index x_samples, Index shift_samples, std::uint64_t seed) {
  const GridSpec& g = k.grid;
  const Scalar dexp = static_cast<Scalar>(g.d);
  auto lq_norm_at = [&](Scalar x1, Scalar x2) {
    ArrayX vals(tgrid.count);
    for (Index j = 0; j < tgrid.count; ++j) {
      const Scalar t = tgrid.node(j);
      vals(j) = std::abs(k.value(x1 / t, x2 / t)) * std::pow(t, -dexp);
    }
    return integrate_time(vals, q, tgrid);
  };
  auto lq_diff_at = [&](Scalar x1, Scalar x2, Scalar y1, Scalar y2) {
    ArrayX vals(tgrid.count);
    for (Index j = 0; j < tgrid.count; ++j) {
      const Scalar t = tgrid.node(j);
      vals(j) = std::abs(k.value((x1 + y1) / t, (x2 + y2) / t) - k.value(x1 / t, x2 / t)) *
                std::pow(t, -dexp);
    }
    return integrate_time(vals, q, tgrid);
  };

  HormanderReport rep;
  Rng rng(seed);
  const Scalar rmin = 4 * g.spacing();
  const Scalar rmax = g.half_width / 2;
  for (Index s = 0; s < x_samples; ++s) {
    const Scalar r = rmin * std::pow(rmax / rmin, static_cast<Scalar>(s) /
                                                      static_cast<Scalar>(x_samples - 1));
    Scalar ux = 1, uy = 0;
    if (g.d == 2) {
      const Scalar a = rng.uniform(0, 2 * kPi);
      ux = std::cos(a);
      uy = std::sin(a);
    } else if (s % 2 == 1) {
      ux = -1;
    }
    const Scalar x1 = r * ux, x2 = r * uy;
    rep.size_sup = std::max(rep.size_sup, lq_norm_at(x1, x2) * std::pow(r, dexp));
    for (Index ss = 0; ss < shift_samples; ++ss) {
      const Scalar rho = rng.uniform(0.05, 0.45) * r;  // |y| < |x| / 2
      Scalar vx = rng.sign(), vy = 0;
      if (g.d == 2) {
        const Scalar a = rng.uniform(0, 2 * kPi);
        vx = std::cos(a);
        vy = std::sin(a);
      }
      const Scalar y1 = rho * vx, y2 = rho * vy;
      rep.smoothness_sup =
          std::max(rep.smoothness_sup, lq_diff_at(x1, x2, y1, y2) *
                                           std::pow(r, dexp + k.delta) / std::pow(rho, k.delta));
    }
  }
  return rep;
}

Scalar dyadic_bump(Scalar r) {
  if (r <= 0.5 || r >= 2.0) return 0.0;
  auto expm = [](Scalar u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; };
  auto step = [&](Scalar u) {  // C^inf transition, 0 for u<=0, 1 for u>=1
    const Scalar a = expm(u), b = expm(1 - u);
    return a / (a + b);
  };
  const Scalar v = std::log2(r);
  return step(v + 1) - step(v);
}

namespace {

// rho_0 covers |x| < 1; rho_k is the ring bump eta(2^{-k+1} |x|) for k >= 1.
Scalar uchiyama_rho(int level, Scalar r) {
  if (level >= 1) return dyadic_bump(std::ldexp(r, -level + 1));
  if (r <= 0) return 1.0;
  Scalar s = 0;
  for (int j = 0; j < 64; ++j) {
    const Scalar v = std::ldexp(r, -j);
    if (v <= 0.5) break;
    s += dyadic_bump(v);
  }
  return 1.0 - s;
}

Scalar holder_constant_on_support(const GridSpec& g, const ArrayXc& vals, Scalar delta,
                                  Scalar support_radius, Index pair_samples, Rng& rng) {
  std::vector<Index> inside;
  for (Index i = 0; i < g.size(); ++i)
    if (std::hypot(g.x1(i), g.x2(i)) <= support_radius + g.spacing() &&
        std::abs(vals(i)) > 0)
      inside.push_back(i);
  if (inside.size() < 2) return 0.0;
  for (Index i = 0; i < g.size(); ++i)  // neighbours of the support matter too
    if (std::hypot(g.x1(i), g.x2(i)) <= support_radius + 2 * g.spacing()) inside.push_back(i);
  auto ratio = [&](Index i, Index j) {
    if (i == j) return 0.0;
    const Scalar dx = std::hypot(g.x1(i) - g.x1(j), g.x2(i) - g.x2(j));
    return dx > 0 ? std::abs(vals(i) - vals(j)) / std::pow(dx, delta) : 0.0;
  };
  Scalar c = 0;
  const Index n = static_cast<Index>(inside.size());
  for (Index s = 0; s < pair_samples; ++s)
    c = std::max(c, ratio(inside[rng.uniform_index(n)], inside[rng.uniform_index(n)]));
  for (Index s = 0; s + 1 < n; ++s) c = std::max(c, ratio(inside[s], inside[s + 1]));
  return c;
}

}  // namespace

UchiyamaDecomposition uchiyama_decompose(const HolderKernel& k, int kmax, Scalar tail_tol,
                                         Index pair_samples, std::uint64_t seed) {
  const GridSpec& g = k.grid;
  const Index n = g.size();
  const Scalar vol = g.cell_volume();
  ArrayX radii(n);
  for (Index i = 0; i < n; ++i) radii(i) = std::hypot(g.x1(i), g.x2(i));

  // Ring scales beyond the sampling window cannot be represented; they are
  // absorbed into the reported reconstruction error.
  const int kcap = std::min(kmax, static_cast<int>(std::floor(std::log2(g.half_width))));

  UchiyamaDecomposition dec;
  std::vector<ArrayXc> terms;  // g_k = phi rho_k - zeta_k + zeta_{k-1}
  ArrayXc zeta_prev = ArrayXc::Zero(n);
  Complex cumulative(0, 0);
  for (int level = 0; level <= kcap; ++level) {
    ArrayX rho(n);
    for (Index i = 0; i < n; ++i) rho(i) = uchiyama_rho(level, radii(i));
    const Scalar rho_mass = rho.sum() * vol;
    Complex rho_phi(0, 0);
    for (Index i = 0; i < n; ++i) rho_phi += rho(i) * k.samples(i);
    rho_phi *= vol;
    cumulative += rho_phi;
    ArrayXc zeta = ArrayXc::Zero(n);
    if (std::abs(rho_mass) > 1e-14) zeta = (cumulative / rho_mass) * rho.cast<Complex>();
    ArrayXc term = k.samples * rho.cast<Complex>() - zeta + zeta_prev;
    terms.push_back(std::move(term));
    zeta_prev = std::move(zeta);
  }

  ArrayXc resid = k.samples;
  for (const auto& t : terms) resid -= t;
  dec.reconstruction_sup_error = resid.abs().maxCoeff();
  if (dec.reconstruction_sup_error > tail_tol) {
    std::ostringstream msg;
    msg << "uchiyama_decompose: reconstruction tail " << dec.reconstruction_sup_error
        << " above tolerance " << tail_tol << "; increase Kmax";
    throw std::runtime_error(msg.str());
  }

  // Rescale each ring piece to unit scale: h_level(y) = 2^{level d} g_level(2^level y).
  // A final multiple of the ring bump makes the mean vanish exactly in the
  // atom's own discrete measure (the stride-subsampled lattice); the same
  // multiple is folded back into the full-lattice term so reconstruction and
  // atoms stay consistent.
  const Index half = g.n / 2;
  Rng rng(seed);
  std::vector<ArrayXc> raw(terms.size());
  std::vector<Scalar> holder(terms.size(), 0.0);
  Scalar constant = 0;
  for (std::size_t lv = 0; lv < terms.size(); ++lv) {
    ArrayXc hk = ArrayXc::Zero(n);
    ArrayX rk = ArrayX::Zero(n);
    const Scalar scale = std::ldexp(1.0, static_cast<int>(lv) * g.d);
    const Index stride = static_cast<Index>(std::ldexp(1.0, static_cast<int>(lv)));
    auto mapped = [&](Index i) -> Index {  // grid index of 2^level * x_i, or -1
      const Index j = half + (i - half) * stride;
      return j >= 0 && j < g.n ? j : -1;
    };
    auto place = [&](Index flat, Index src) {
      if (radii(flat) > 1.0 + g.spacing()) return;
      hk(flat) = scale * terms[lv](src);
      rk(flat) = scale * uchiyama_rho(static_cast<int>(lv), radii(src));
    };
    if (g.d == 1) {
      for (Index i = 0; i < g.n; ++i) {
        const Index j = mapped(i);
        if (j >= 0) place(i, j);
      }
    } else {
      for (Index ix = 0; ix < g.n; ++ix) {
        const Index jx = mapped(ix);
        if (jx < 0) continue;
        for (Index iy = 0; iy < g.n; ++iy) {
          const Index jy = mapped(iy);
          if (jy >= 0) place(ix * g.n + iy, jx * g.n + jy);
        }
      }
    }
    const Scalar rk_mass = rk.sum();
    if (rk_mass > 1e-12) {
      const Complex gamma = hk.sum() / rk_mass;
      hk -= gamma * rk.cast<Complex>();
      // fold the correction into the full-lattice term
      for (Index i = 0; i < n; ++i)
        terms[lv](i) -= gamma * uchiyama_rho(static_cast<int>(lv), radii(i));
    }
    holder[lv] = holder_constant_on_support(g, hk, k.delta, 1.0, pair_samples, rng);
    constant = std::max(constant, holder[lv] * std::pow(2.0, k.eps * static_cast<Scalar>(lv)));
    raw[lv] = std::move(hk);
  }
  dec.constant = constant;

  // Residual against the corrected terms.
  resid = k.samples;
  for (const auto& t : terms) resid -= t;
  dec.reconstruction_sup_error = std::max(dec.reconstruction_sup_error, resid.abs().maxCoeff());

  for (std::size_t lv = 0; lv < raw.size(); ++lv) {
    UchiyamaLevel out;
    out.level = static_cast<int>(lv);
    const Scalar norm =
        constant > 0 ? std::pow(2.0, k.eps * static_cast<Scalar>(lv)) / constant : 0.0;
    out.psi = raw[lv] * norm;
    Complex mean(0, 0);
    Scalar outside = 0;
    for (Index i = 0; i < n; ++i) {
      mean += out.psi(i);
      if (radii(i) > 1.0 + g.spacing()) outside = std::max(outside, std::abs(out.psi(i)));
    }
    out.mean_abs = std::abs(mean) * vol;
    out.outside_unit_ball = outside;
    out.holder_constant = holder[lv] * norm;
    dec.levels.push_back(std::move(out));
  }
  return dec;
}

Scalar calderon_check(const HolderKernel& phi, const HolderKernel& psi, const ArrayX& xi_samples,
                      const LogTimeGrid& tgrid, Scalar tail_tol) {
  Scalar worst = 0;
  for (Index s = 0; s < xi_samples.size(); ++s) {
    const Scalar xi = xi_samples(s);
    if (xi == 0) continue;
    Complex acc(0, 0);
    Complex first(0, 0), last(0, 0);
    for (Index j = 0; j < tgrid.count; ++j) {
      const Scalar t = tgrid.node(j);
      const Complex v = phi.fourier_at(t * xi) * psi.fourier_at(t * xi);
      acc += v;
      if (j == 0) first = v;
      if (j == tgrid.count - 1) last = v;
    }
    if (std::abs(first) * tgrid.weight() > tail_tol || std::abs(last) * tgrid.weight() > tail_tol)
      throw std::runtime_error("calderon_check: time grid too narrow, integrand tail above tolerance");
    worst = std::max(worst, std::abs(acc * tgrid.weight() - Complex(1, 0)));
  }
  return worst;
}

std::string dump_kernel_csv(const HolderKernel& k, Scalar t) {
  if (!(t > 0)) throw std::invalid_argument("dump_kernel_csv: t must be positive");
  std::ostringstream os;
  os.precision(17);
  if (k.grid.d == 1)
    os << "x,value_re,value_im\n";
  else
    os << "x,y,value_re,value_im\n";
  const Scalar scale = std::pow(t, -static_cast<Scalar>(k.grid.d));
  for (Index i = 0; i < k.grid.size(); ++i) {
    const Scalar x1 = k.grid.x1(i), x2 = k.grid.x2(i);
    const Complex v = scale * k.value(x1 / t, x2 / t);
    os << x1 << ',';
    if (k.grid.d == 2) os << x2 << ',';
    os << v.real() << ',' << v.imag() << '\n';
  }
  return os.str();
}

}  // namespace lps
