#include "lps/gfunc.hpp"

#include "lps/fft.hpp"
#include "lps/numgrid.hpp"
#include "lps/rng.hpp"

#include <sstream>

namespace lps {

Scalar lp_norm(const GFunctionResult& g, Scalar p) { return lp_norm(g.values, g.grid, p); }

ArrayXc dilated_kernel_hat(const HolderKernel& phi, const GridSpec& g, Scalar t) {
  if (phi.fourier)
    return multiplier_table(g, [&](Scalar xi1, Scalar xi2) { return phi.fourier(t * xi1, t * xi2); });
  const Scalar scale = std::pow(t, -static_cast<Scalar>(g.d));
  ArrayXc natural(g.size());
  for (Index i = 0; i < g.size(); ++i)
    natural(i) = scale * phi.value(g.x1(i) / t, g.x2(i) / t);
  return kernel_hat_from_samples(g, natural);
}

ArrayXc semigroup_kernel_hat(const SemigroupSpec& sg, const GridSpec& g, Scalar t) {
  if (sg.multiplier)
    return multiplier_table(g, [&](Scalar x, Scalar y) { return sg.multiplier(t, x, y); });
  if (!sg.kernel) throw std::invalid_argument("semigroup has neither multiplier nor kernel");
  ArrayXc natural(g.size());
  for (Index i = 0; i < g.size(); ++i) natural(i) = Complex(sg.kernel(t, g.x1(i), g.x2(i)), 0);
  return kernel_hat_from_samples(g, natural);
}

ArrayXc semigroup_dt_kernel_hat(const SemigroupSpec& sg, const GridSpec& g, Scalar t) {
  if (sg.dt_multiplier)
    return multiplier_table(g, [&](Scalar x, Scalar y) { return sg.dt_multiplier(t, x, y); });
  if (sg.multiplier) {
    const Scalar eta = sg.dt_log_step;
    return multiplier_table(g, [&](Scalar x, Scalar y) {
      return (sg.multiplier(t * std::exp(eta), x, y) - sg.multiplier(t * std::exp(-eta), x, y)) /
             (2 * eta);
    });
  }
  ArrayXc natural(g.size());
  for (Index i = 0; i < g.size(); ++i)
    natural(i) = Complex(dt_kernel(sg, t, g.x1(i), g.x2(i)), 0);
  return kernel_hat_from_samples(g, natural);
}

namespace {

// Shared accumulation over the time grid. level_norms(j) must return the
// pointwise X-norms of the level-j convolution.
GFunctionResult accumulate_time(const Field& f, Scalar q, const LogTimeGrid& tg,
                                const std::function<ArrayX(Index)>& level_norms,
                                Scalar tail_tol) {
  if (!(q >= 1)) throw std::invalid_argument("invalid exponent");
  GFunctionResult out;
  out.grid = f.grid;
  out.q = q;
  out.tgrid = tg;
  const bool use_max = std::isinf(q);
  ArrayX acc = ArrayX::Zero(f.grid.size());
  Scalar energy_total = 0, energy_low = 0, energy_high = 0;
  const Scalar decade_lo = tg.t_min * 10.0;
  const Scalar decade_hi = tg.t_max / 10.0;
  for (Index j = 0; j < tg.count; ++j) {
    const ArrayX norms = level_norms(j);
    const Scalar t = tg.node(j);
    if (use_max) {
      acc = acc.max(norms);
      const Scalar e = norms.size() ? norms.maxCoeff() : 0;
      energy_total = std::max(energy_total, e);
      if (t < decade_lo) energy_low = std::max(energy_low, e);
      if (t > decade_hi) energy_high = std::max(energy_high, e);
    } else {
      const ArrayX powed = norms.pow(q) * tg.weight();
      acc += powed;
      const Scalar e = powed.sum();
      energy_total += e;
      if (t < decade_lo) energy_low += e;
      if (t > decade_hi) energy_high += e;
    }
  }
  out.values = use_max ? acc : ArrayX(acc.pow(1.0 / q));
  if (energy_total > 0) {
    out.tail_fraction_low = energy_low / energy_total;
    out.tail_fraction_high = energy_high / energy_total;
  }
  out.flagged = out.tail_fraction_low > tail_tol || out.tail_fraction_high > tail_tol;
  return out;
}

// circular windowed sums: out(i) = sum_{|s| <= halfwidth} u((i+s) mod n)
ArrayX circular_window_sum(const ArrayX& u, Index halfwidth) {
  const Index n = u.size();
  ArrayX out(n);
  if (2 * halfwidth + 1 >= n) {
    out.setConstant(u.sum());
    return out;
  }
  Scalar s = 0;
  for (Index k = -halfwidth; k <= halfwidth; ++k) s += u(((k % n) + n) % n);
  for (Index i = 0; i < n; ++i) {
    out(i) = s;
    s += u((i + halfwidth + 1) % n) - u(((i - halfwidth) % n + n) % n);
  }
  return out;
}

// even window [i - side/2, i + side/2 - 1], used by the maximal function
ArrayX circular_even_window_sum(const ArrayX& u, Index side) {
  const Index n = u.size();
  ArrayX out(n);
  if (side >= n) {
    out.setConstant(u.sum());
    return out;
  }
  const Index hw = side / 2;
  Scalar s = 0;
  for (Index k = -hw; k <= hw - 1; ++k) s += u(((k % n) + n) % n);
  for (Index i = 0; i < n; ++i) {
    out(i) = s;
    s += u((i + hw) % n) - u(((i - hw) % n + n) % n);
  }
  return out;
}

}  // namespace

GFunctionResult g_conv(const Field& f, const HolderKernel& phi, Scalar q,
                       const LogTimeGrid& tgrid, Scalar tail_tol) {
  ConvolutionPlan plan(f);
  ArrayXXc buf;
  return accumulate_time(
      f, q, tgrid,
      [&](Index j) {
        plan.apply(dilated_kernel_hat(phi, f.grid, tgrid.node(j)), buf);
        return f.target.norms(buf);
      },
      tail_tol);
}

GFunctionResult g_semigroup(const Field& f, const SemigroupSpec& sg, Scalar q,
                            const LogTimeGrid& tgrid, Scalar tail_tol) {
  ConvolutionPlan plan(f);
  ArrayXXc buf;
  return accumulate_time(
      f, q, tgrid,
      [&](Index j) {
        plan.apply(semigroup_dt_kernel_hat(sg, f.grid, tgrid.node(j)), buf);
        return f.target.norms(buf);
      },
      tail_tol);
}

GFunctionResult lusin_area(const Field& f, const HolderKernel& phi, Scalar q,
                           const LogTimeGrid& tgrid, Scalar tail_tol) {
  if (std::isinf(q)) throw std::invalid_argument("lusin_area: finite q required");
  const GridSpec& g = f.grid;
  const Scalar h = g.spacing();
  ConvolutionPlan plan(f);
  ArrayXXc buf;
  return accumulate_time(
      f, q, tgrid,
      [&](Index j) -> ArrayX {
        const Scalar t = tgrid.node(j);
        plan.apply(dilated_kernel_hat(phi, g, t), buf);
        const ArrayX uq = f.target.norms(buf).pow(q);
        // integrate ||phi_t * f||^q over the cone slice |y - x| < t
        const Index halfwidth = std::max<Index>(0, static_cast<Index>(std::ceil(t / h)) - 1);
        ArrayX slice;
        if (g.d == 1) {
          slice = circular_window_sum(uq, halfwidth) * h;
        } else {
          slice = ArrayX::Zero(g.size());
          ArrayX row(g.n), rowsum(g.n);
          for (Index d1 = -halfwidth; d1 <= halfwidth; ++d1) {
            const Scalar rem = t * t - static_cast<Scalar>(d1) * h * static_cast<Scalar>(d1) * h;
            if (rem <= 0) continue;
            const Index wx =
                std::max<Index>(0, static_cast<Index>(std::ceil(std::sqrt(rem) / h)) - 1);
            for (Index ix = 0; ix < g.n; ++ix) {
              const Index sx = ((ix + d1) % g.n + g.n) % g.n;
              row = uq.segment(sx * g.n, g.n);
              rowsum = circular_window_sum(row, wx);
              slice.segment(ix * g.n, g.n) += rowsum * h * h;
            }
          }
        }
        // dt/t^{d+1} = (dt/t)/t^d; the accumulator supplies dt/t and raises to q
        return (slice * std::pow(t, -static_cast<Scalar>(g.d))).pow(1.0 / q);
      },
      tail_tol);
}

LacunaryResult lacunary_diff(const Field& f, const SemigroupSpec& sg, Scalar a, Scalar t0,
                             Scalar q, int kmin, int kmax, Scalar tail_tol) {
  if (!(a > 1)) throw std::invalid_argument("lacunary_diff: a > 1 required");
  if (!(t0 >= 1 && t0 <= a)) throw std::invalid_argument("lacunary_diff: t0 in [1, a] required");
  if (kmin > kmax) throw std::invalid_argument("lacunary_diff: empty level range");
  ConvolutionPlan plan(f);
  ArrayXXc buf;
  ArrayX acc = ArrayX::Zero(f.grid.size());
  Scalar first_term = 0, last_term = 0, total = 0;
  for (int k = kmin; k <= kmax; ++k) {
    const Scalar t1 = std::pow(a, k) * t0, t2 = std::pow(a, k + 1) * t0;
    const ArrayXc khat =
        semigroup_kernel_hat(sg, f.grid, t1) - semigroup_kernel_hat(sg, f.grid, t2);
    plan.apply(khat, buf);
    const ArrayX term = f.target.norms(buf).pow(q);
    acc += term;
    const Scalar e = term.sum();
    total += e;
    if (k == kmin) first_term = e;
    if (k == kmax) last_term = e;
  }
  LacunaryResult out;
  out.grid = f.grid;
  out.values = acc.pow(1.0 / q);
  out.flagged = total > 0 && (first_term / total > tail_tol || last_term / total > tail_tol);
  return out;
}

GFunctionResult intrinsic_g(const Field& f, Scalar eps, Scalar delta, Scalar q,
                            const LogTimeGrid& tgrid, const std::vector<HolderKernel>& dictionary,
                            Scalar class_slack) {
  if (dictionary.empty()) throw std::invalid_argument("intrinsic_g: empty dictionary");
  for (const auto& k : dictionary) {
    if (k.eps != eps || k.delta != delta)
      throw std::invalid_argument("intrinsic_g: dictionary kernel declares a different class");
    const HolderReport rep = holder_check(k, 4000, 99);
    if (rep.size_constant > 1 + class_slack || rep.smoothness_constant > 1 + class_slack)
      throw std::invalid_argument("intrinsic_g: dictionary kernel outside the unit Holder class");
  }
  ConvolutionPlan plan(f);
  ArrayXXc buf;
  return accumulate_time(
      f, q, tgrid,
      [&](Index j) {
        const Scalar t = tgrid.node(j);
        ArrayX best = ArrayX::Zero(f.grid.size());
        for (const auto& k : dictionary) {
          plan.apply(dilated_kernel_hat(k, f.grid, t), buf);
          best = best.max(f.target.norms(buf));
        }
        return best;
      },
      1.0);
}

Field maximal(const Field& w) {
  if (w.target.m != 1) throw std::invalid_argument("maximal: scalar field required");
  const ArrayX vals = w.values.col(0).real();
  if (w.values.col(0).imag().abs().maxCoeff() > 0 || (vals < 0).any())
    throw std::invalid_argument("maximal: negative input");
  const GridSpec& g = w.grid;
  const int levels = static_cast<int>(std::log2(static_cast<double>(g.n)));
  ArrayX best = vals;  // the single-cell cube
  for (int j = 1; j <= levels; ++j) {
    const Index side = static_cast<Index>(1) << j;
    if (g.d == 1) {
      best = best.max(circular_even_window_sum(vals, side) / static_cast<Scalar>(side));
    } else {
      ArrayX sums(g.size());
      ArrayX line(g.n);
      for (Index ix = 0; ix < g.n; ++ix) {
        line = vals.segment(ix * g.n, g.n);
        sums.segment(ix * g.n, g.n) = circular_even_window_sum(line, side);
      }
      ArrayX colsum(g.n), win(g.n);
      for (Index iy = 0; iy < g.n; ++iy) {
        for (Index ix = 0; ix < g.n; ++ix) colsum(ix) = sums(ix * g.n + iy);
        win = circular_even_window_sum(colsum, side);
        for (Index ix = 0; ix < g.n; ++ix) sums(ix * g.n + iy) = win(ix);
      }
      best = best.max(sums / static_cast<Scalar>(side * side));
    }
  }
  Field out(g, VectorTarget(2.0, 1));
  out.values.col(0) = best.cast<Complex>();
  return out;
}

WeightedPair weighted_check(const Field& f, const Field& w, const HolderKernel& phi, Scalar q,
                            const LogTimeGrid& tgrid) {
  if (w.target.m != 1) throw std::invalid_argument("weighted_check: scalar weight required");
  const ArrayX wv = w.values.col(0).real();
  if ((wv < 0).any()) throw std::invalid_argument("weighted_check: negative weight");
  const GFunctionResult s = lusin_area(f, phi, q, tgrid);
  WeightedPair out;
  out.lhs = std::pow((s.values.pow(q) * wv).sum() * f.grid.cell_volume(), 1.0 / q);
  const ArrayX mw = maximal(w).values.col(0).real();
  out.rhs = std::pow((f.norms().pow(q) * mw).sum() * f.grid.cell_volume(), 1.0 / q);
  return out;
}

// ---------------------------------------------------------------------------
// Test families

std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::PoissonScales: return "poisson-scales";
    case FamilyKind::HeatScales: return "heat-scales";
    case FamilyKind::GaussianBumps: return "gaussian-bumps";
    case FamilyKind::DyadicSteps: return "dyadic-steps";
    case FamilyKind::TrigPolynomials: return "trig-polynomials";
  }
  return "unknown";
}

namespace {

// random direction on the unit sphere of l_r^m
ArrayXc random_direction(const VectorTarget& X, Rng& rng) {
  ArrayXc dir(X.m);
  for (Index c = 0; c < X.m; ++c) dir(c) = rng.cnormal();
  ArrayXXc tmp(1, X.m);
  tmp.row(0) = dir.transpose();
  const Scalar nrm = X.norm_row(tmp, 0);
  return nrm > 0 ? ArrayXc(dir / nrm) : dir;
}

Field scalar_profile_member(const GridSpec& g, const VectorTarget& X,
                            const std::function<Scalar(Scalar, Scalar)>& profile, Rng& rng) {
  Field f(g, X);
  const ArrayXc dir = X.m == 1 ? ArrayXc::Ones(1) : random_direction(X, rng);
  for (Index i = 0; i < g.size(); ++i) {
    const Scalar v = profile(g.x1(i), g.x2(i));
    for (Index c = 0; c < X.m; ++c) f.values(i, c) = v * dir(c);
  }
  return f;
}

}  // namespace

TestFamily make_family(FamilyKind kind, const GridSpec& grid, const VectorTarget& target,
                       Index count, std::uint64_t seed) {
  TestFamily fam;
  fam.name = family_name(kind);
  const Scalar h = grid.spacing();
  for (Index i = 0; i < count; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    std::ostringstream label;
    switch (kind) {
      case FamilyKind::PoissonScales: {
        const Scalar s = 8 * h * std::pow(grid.half_width / (128 * h),
                                          count > 1 ? static_cast<Scalar>(i) / (count - 1) : 0.5);
        fam.members.push_back(scalar_profile_member(
            grid, target,
            [&](Scalar x, Scalar y) { return poisson_kernel(s, std::hypot(x, y), grid.d); }, rng));
        label << "poisson s=" << s;
        break;
      }
      case FamilyKind::HeatScales: {
        const Scalar s = 8 * h * std::pow(grid.half_width / (128 * h),
                                          count > 1 ? static_cast<Scalar>(i) / (count - 1) : 0.5);
        fam.members.push_back(scalar_profile_member(
            grid, target,
            [&](Scalar x, Scalar y) { return heat_kernel(s * s, std::hypot(x, y), grid.d); }, rng));
        label << "heat t=" << s * s;
        break;
      }
      case FamilyKind::GaussianBumps: {
        const Scalar c1 = rng.uniform(-grid.half_width / 4, grid.half_width / 4);
        const Scalar c2 = grid.d == 2 ? rng.uniform(-grid.half_width / 4, grid.half_width / 4) : 0;
        const Scalar sigma =
            4 * h * std::exp(rng.uniform() * std::log(grid.half_width / (64 * h)));
        fam.members.push_back(scalar_profile_member(
            grid, target,
            [&](Scalar x, Scalar y) {
              const Scalar r2 = (x - c1) * (x - c1) + (y - c2) * (y - c2);
              return std::exp(-r2 / (2 * sigma * sigma));
            },
            rng));
        label << "bump c=" << c1 << " sigma=" << sigma;
        break;
      }
      case FamilyKind::DyadicSteps: {
        const Index blocks = std::min<Index>(32, grid.n / 4);
        const Index block_len = grid.n / blocks;
        Field f(grid, target);
        std::vector<ArrayXc> coeff(blocks);
        for (Index b = 0; b < blocks; ++b) {
          coeff[b].resize(target.m);
          for (Index c = 0; c < target.m; ++c) coeff[b](c) = rng.cnormal();
        }
        for (Index ix = 0; ix < grid.size(); ++ix) {
          const Index b = (grid.ix(ix) / block_len) % blocks;
          const bool inside = std::abs(grid.x1(ix)) <= grid.half_width / 2 &&
                              (grid.d == 1 || std::abs(grid.x2(ix)) <= grid.half_width / 2);
          for (Index c = 0; c < target.m; ++c) f.values(ix, c) = inside ? coeff[b](c) : 0;
        }
        fam.members.push_back(std::move(f));
        label << "steps blocks=" << blocks;
        break;
      }
      case FamilyKind::TrigPolynomials: {
        const int kmaxf = std::min<int>(12, static_cast<int>(std::log2(grid.n / 8)));
        Field f(grid, target);
        f.values.setZero();
        for (int k = 0; k <= kmaxf; ++k) {
          const Scalar freq = std::ldexp(1.0, k) / (2 * grid.half_width);
          const ArrayXc dir = random_direction(target, rng);
          const Scalar sign = rng.sign();
          for (Index ix = 0; ix < grid.size(); ++ix) {
            const Complex e = std::exp(Complex(0, 2 * kPi * freq * grid.x1(ix))) * sign;
            for (Index c = 0; c < target.m; ++c) f.values(ix, c) += e * dir(c);
          }
        }
        fam.members.push_back(std::move(f));
        label << "trig lacunary kmax=" << kmaxf;
        break;
      }
    }
    fam.labels.push_back(label.str());
  }
  return fam;
}

TestFamily standard_suite(const GridSpec& grid, std::uint64_t seed) {
  TestFamily suite;
  suite.name = "standard-suite";
  auto append = [&](TestFamily part) {
    for (std::size_t i = 0; i < part.members.size(); ++i) {
      suite.members.push_back(std::move(part.members[i]));
      suite.labels.push_back(part.name + ":" + part.labels[i]);
    }
  };
  append(make_family(FamilyKind::PoissonScales, grid, VectorTarget(2, 1), 3, seed));
  append(make_family(FamilyKind::HeatScales, grid, VectorTarget(2, 1), 3, seed + 1));
  append(make_family(FamilyKind::GaussianBumps, grid, VectorTarget(2, 1), 2, seed + 2));
  append(make_family(FamilyKind::DyadicSteps, grid, VectorTarget(3, 4), 2, seed + 3));
  append(make_family(FamilyKind::TrigPolynomials, grid, VectorTarget(2, 2), 2, seed + 4));
  return suite;
}

namespace {

template <typename GFun>
ConstantEstimate estimate_impl(const TestFamily& family, GFun&& gfun, Scalar p, Scalar q,
                               const LogTimeGrid& tgrid, std::uint64_t seed) {
  ConstantEstimate est;
  est.p = p;
  est.q = q;
  est.family = family.name;
  est.seed = seed;
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const Field& f = family.members[i];
    if (i == 0) {
      est.r = f.target.r;
      est.m = f.target.m;
      est.d = f.grid.d;
      est.half_width = f.grid.half_width;
      est.n = f.grid.n;
      est.t_min = tgrid.t_min;
      est.t_max = tgrid.t_max;
      est.t_count = tgrid.count;
    }
    const Scalar denom = lp_norm(f, p);
    if (denom <= 0) {
      ++est.skipped;
      continue;
    }
    const GFunctionResult g = gfun(f);
    const Scalar ratio = lp_norm(g, p) / denom;
    ++est.samples_used;
    if (ratio > est.estimate) {
      est.estimate = ratio;
      est.argmax_label = family.labels[i];
    }
  }
  return est;
}

}  // namespace

ConstantEstimate estimate_constant(const TestFamily& family, const SemigroupSpec& sg, Scalar p,
                                   Scalar q, const LogTimeGrid& tgrid, std::uint64_t seed) {
  return estimate_impl(
      family, [&](const Field& f) { return g_semigroup(f, sg, q, tgrid); }, p, q, tgrid, seed);
}

ConstantEstimate estimate_constant(const TestFamily& family, const HolderKernel& phi, Scalar p,
                                   Scalar q, const LogTimeGrid& tgrid, std::uint64_t seed) {
  return estimate_impl(
      family, [&](const Field& f) { return g_conv(f, phi, q, tgrid); }, p, q, tgrid, seed);
}

}  // namespace lps
