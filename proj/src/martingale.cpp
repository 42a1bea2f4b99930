#include "lps/martingale.hpp"

#include "lps/numgrid.hpp"

#include <bit>
#include <sstream>

namespace lps {

// ---------------------------------------------------------------------------
// 3Q partition

std::vector<DyadicLikeFamily> three_q_partition(int d) {
  if (d != 1 && d != 2) throw std::invalid_argument("three_q_partition: d must be 1 or 2");
  std::vector<DyadicLikeFamily> fams;
  if (d == 1) {
    for (int s = 0; s < 3; ++s) {
      DyadicLikeFamily f;
      f.kind = DyadicLikeFamily::Kind::ThreeQ;
      f.d = 1;
      f.selector0 = s;
      fams.push_back(f);
    }
  } else {
    for (int s0 = 0; s0 < 3; ++s0)
      for (int s1 = 0; s1 < 3; ++s1) {
        DyadicLikeFamily f;
        f.kind = DyadicLikeFamily::Kind::ThreeQ;
        f.d = 2;
        f.selector0 = s0;
        f.selector1 = s1;
        fams.push_back(f);
      }
  }
  return fams;
}

ThreeQInterval three_q_of(int level, long long j) {
  // 3Q of [j 2^{-k}, (j+1) 2^{-k}) starts at (j-1) 2^{-k}
  const long long n = j - 1;
  ThreeQInterval q;
  q.level = level;
  q.shift = static_cast<int>(((n % 3) + 3) % 3);
  q.j = (n - q.shift) / 3;
  return q;
}

int three_q_family_of(const ThreeQInterval& q) {
  for (int s = 0; s < 3; ++s)
    if (DyadicLikeFamily::three_q_shift(q.level, s) == q.shift) return s;
  return -1;  // unreachable: the selector map is a bijection mod 3
}

FamilyAxiomReport check_family_axioms(const DyadicLikeFamily& fam, int kmin, int kmax,
                                      long long jmax) {
  if (fam.kind != DyadicLikeFamily::Kind::ThreeQ || fam.d != 1)
    throw std::invalid_argument("check_family_axioms: 3Q family with d = 1 expected");
  FamilyAxiomReport rep;
  auto shift_at = [&](int k) { return DyadicLikeFamily::three_q_shift(k, fam.selector0); };
  auto members = [&](int k) {  // start indices n = 3j + shift with |j| <= jmax
    std::vector<long long> out;
    for (long long j = -jmax; j <= jmax; ++j) out.push_back(3 * j + shift_at(k));
    return out;
  };

  for (int k = kmin; k <= kmax; ++k) {
    for (long long n : members(k)) {
      if (k < kmax) {
        // children closure: both dyadic halves live one level down
        for (long long c : {2 * n, 2 * n + 3})
          if ((((c % 3) + 3) % 3) != shift_at(k + 1)) ++rep.children_violations;
      }
      if (k > kmin) {
        // parent existence: the unique dyadic double containing this interval
        const long long m = (n % 2 == 0) ? n / 2 : (n - 3) / 2;
        const bool in_family = (((m % 3) + 3) % 3) == shift_at(k - 1);
        const bool covers = 2 * m <= n && n + 3 <= 2 * m + 6;
        if (!in_family || !covers) ++rep.parent_violations;
      }
    }
  }

  // nesting trichotomy across level pairs
  for (int k = kmin; k <= kmax; ++k)
    for (int kf = k + 1; kf <= kmax; ++kf) {
      const long long scale = 1LL << (kf - k);
      for (long long nf : members(kf))
        for (long long n : members(k)) {
          const long long lo = n * scale, hi = (n + 3) * scale;
          const bool disjoint = nf + 3 <= lo || nf >= hi;
          const bool inside = nf >= lo && nf + 3 <= hi;
          if (!disjoint && !inside) ++rep.nesting_violations;
        }
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Conditional expectations

namespace {

void require_unit_cube(const GridSpec& g) {
  if (g.origin != GridOrigin::ZeroBased || g.half_width != 0.5)
    throw std::invalid_argument("misaligned grid: zero-based unit cube required");
}

}  // namespace

Field cond_expect(const Field& f, int k) {
  require_unit_cube(f.grid);
  const GridSpec& g = f.grid;
  if (k <= 0) k = 0;
  const Index cells = static_cast<Index>(1) << k;
  if (cells > g.n) throw std::invalid_argument("misaligned grid: level below resolution");
  const Index block = g.n / cells;
  Field out(g, f.target);
  if (g.d == 1) {
    for (Index c = 0; c < cells; ++c) {
      ArrayXc mean = ArrayXc::Zero(f.target.m);
      for (Index i = c * block; i < (c + 1) * block; ++i) mean += f.values.row(i).transpose();
      mean /= static_cast<Scalar>(block);
      for (Index i = c * block; i < (c + 1) * block; ++i) out.values.row(i) = mean.transpose();
    }
  } else {
    for (Index cx = 0; cx < cells; ++cx)
      for (Index cy = 0; cy < cells; ++cy) {
        ArrayXc mean = ArrayXc::Zero(f.target.m);
        for (Index ix = cx * block; ix < (cx + 1) * block; ++ix)
          for (Index iy = cy * block; iy < (cy + 1) * block; ++iy)
            mean += f.values.row(ix * g.n + iy).transpose();
        mean /= static_cast<Scalar>(block * block);
        for (Index ix = cx * block; ix < (cx + 1) * block; ++ix)
          for (Index iy = cy * block; iy < (cy + 1) * block; ++iy)
            out.values.row(ix * g.n + iy) = mean.transpose();
      }
  }
  return out;
}

Field square_fn(const Field& f, Scalar q, int kmin, int kmax) {
  require_unit_cube(f.grid);
  if (kmin > kmax) throw std::invalid_argument("square_fn: empty level range");
  ArrayX acc = ArrayX::Zero(f.grid.size());
  Field prev = cond_expect(f, kmin - 1);
  for (int k = kmin; k <= kmax; ++k) {
    Field cur = cond_expect(f, k);
    ArrayXXc diff = cur.values - prev.values;
    acc += f.target.norms(diff).pow(q);
    prev = std::move(cur);
  }
  Field out(f.grid, VectorTarget(2.0, 1));
  out.values.col(0) = acc.pow(1.0 / q).cast<Complex>();
  return out;
}

namespace {

// average of f over the trace [lo, lo+side) intersected with [0,1); the cube
// family is viewed as a filtration of the probability space [0,1)
ArrayXc cube_average_1d(const Field& f, Scalar lo, Scalar side) {
  const GridSpec& g = f.grid;
  const Scalar h = g.spacing();
  ArrayXc sum = ArrayXc::Zero(f.target.m);
  const Index a = std::max<Index>(0, static_cast<Index>(std::ceil(lo / h - 1e-12)));
  const Index b = std::min<Index>(g.n, static_cast<Index>(std::ceil((lo + side) / h - 1e-12)));
  if (a >= b) return sum;
  for (Index i = a; i < b; ++i) sum += f.values.row(i).transpose();
  return sum / static_cast<Scalar>(b - a);
}

}  // namespace

Field family_square_fn(const Field& f, const DyadicLikeFamily& fam, Scalar q, int kmin,
                       int kmax) {
  require_unit_cube(f.grid);
  const GridSpec& g = f.grid;
  const Scalar h = g.spacing();
  ArrayX acc = ArrayX::Zero(g.size());

  auto add_pairs_1d = [&](Scalar qlo, Scalar qside) {
    const ArrayXc avg_q = cube_average_1d(f, qlo, qside);
    for (int half = 0; half < 2; ++half) {
      const Scalar rlo = qlo + half * qside / 2;
      const ArrayXc avg_r = cube_average_1d(f, rlo, qside / 2);
      ArrayXXc diff(1, f.target.m);
      diff.row(0) = (avg_r - avg_q).transpose();
      const Scalar val = std::pow(f.target.norms(diff)(0), q);
      const Index a = std::max<Index>(0, static_cast<Index>(std::ceil(rlo / h - 1e-12)));
      const Index b =
          std::min<Index>(g.n, static_cast<Index>(std::ceil((rlo + qside / 2) / h - 1e-12)));
      for (Index i = a; i < b; ++i) acc(i) += val;
    }
  };

  for (int k = kmin; k < kmax; ++k) {
    if (fam.kind == DyadicLikeFamily::Kind::Dyadic) {
      if (g.d == 1) {
        const Index cells = static_cast<Index>(1) << std::max(k, 0);
        if (2 * cells > g.n)
          throw std::invalid_argument("misaligned grid: level below resolution");
        if (k < 0) continue;  // coarse cubes collapse to the unit cube itself
        for (Index j = 0; j < cells; ++j)
          add_pairs_1d(static_cast<Scalar>(j) / static_cast<Scalar>(cells),
                       1.0 / static_cast<Scalar>(cells));
      } else {
        // two-dimensional dyadic differences reduce to E_{k+1} - E_k
        Field ek = cond_expect(f, k);
        Field ek1 = cond_expect(f, k + 1);
        ArrayXXc diff = ek1.values - ek.values;
        acc += f.target.norms(diff).pow(q);
      }
    } else {
      if (g.d != 1)
        throw std::invalid_argument("family_square_fn: 3Q families are one-dimensional");
      const Scalar cell = std::ldexp(1.0, -k);
      if (cell < 2 * h - 1e-15)
        throw std::invalid_argument("misaligned grid: level below resolution");
      const Scalar side = 3 * cell;
      const int shift = DyadicLikeFamily::three_q_shift(k, fam.selector0);
      const long long jhi = (static_cast<long long>(1) << std::max(k, 0)) / 3 + 2;
      for (long long j = -2; j <= jhi; ++j) {
        const Scalar lo = static_cast<Scalar>(3 * j + shift) * cell;
        if (lo + side <= 0 || lo >= 1) continue;
        add_pairs_1d(lo, side);
      }
    }
  }
  Field out(g, VectorTarget(2.0, 1));
  out.values.col(0) = acc.pow(1.0 / q).cast<Complex>();
  return out;
}

// ---------------------------------------------------------------------------
// Atoms

AtomReport atom_check(const Field& a, const Cube& q, Scalar qexp, Scalar delta,
                      Index pair_samples, std::uint64_t seed) {
  AtomReport rep;
  const GridSpec& g = a.grid;
  const Scalar h = g.spacing();
  const ArrayX norms = a.norms();
  Complex mean(0, 0);
  std::vector<Index> inside;
  for (Index i = 0; i < g.size(); ++i) {
    const Scalar x = g.x1(i), y = g.x2(i);
    if (!q.contains(x, y, h)) {
      rep.outside_support = std::max(rep.outside_support, norms(i));
    } else {
      inside.push_back(i);
    }
    for (Index c = 0; c < a.target.m; ++c) mean += a.values(i, c);
  }
  rep.mean_abs = std::abs(mean) * g.cell_volume();

  const Scalar unit = std::pow(q.side, static_cast<Scalar>(g.d) / qexp);  // |Q|^{1/q}
  Rng rng(seed);
  auto ratio = [&](Index i, Index j) {
    if (i == j) return 0.0;
    const Scalar dist = std::hypot(g.x1(i) - g.x1(j), g.x2(i) - g.x2(j));
    ArrayXXc diff(1, a.target.m);
    diff.row(0) = a.values.row(i) - a.values.row(j);
    return a.target.norms(diff)(0) * unit / std::pow(dist / q.side, delta);
  };
  const Index n = static_cast<Index>(inside.size());
  if (n >= 2) {
    for (Index s = 0; s < pair_samples; ++s)
      rep.holder_constant = std::max(
          rep.holder_constant, ratio(inside[rng.uniform_index(n)], inside[rng.uniform_index(n)]));
    for (Index s = 0; s + 1 < n; ++s)
      rep.holder_constant = std::max(rep.holder_constant, ratio(inside[s], inside[s + 1]));
  }
  return rep;
}

AtomicDecomposition atomic_decompose(const std::vector<Field>& h, const std::vector<int>& levels,
                                     const HolderKernel& phi, Scalar qexp, Scalar mean_tol) {
  if (h.size() != levels.size() || h.empty())
    throw std::invalid_argument("atomic_decompose: one field per level required");
  const GridSpec& g = h.front().grid;
  if (g.origin != GridOrigin::Centered || g.half_width < 1.5)
    throw std::invalid_argument("atomic_decompose: centered grid containing [-1.5, 1.5) required");
  if (g.d != 1) throw std::invalid_argument("atomic_decompose: d = 1 only");
  const Scalar hs = g.spacing();
  if (std::abs(1.0 / hs - std::round(1.0 / hs)) > 1e-9)
    throw std::invalid_argument("atomic_decompose: grid misaligned with the unit cube");

  // H^0_delta preconditions on phi
  Complex phi_mean(0, 0);
  Scalar outside = 0;
  for (Index i = 0; i < phi.grid.size(); ++i) {
    phi_mean += phi.samples(i);
    const Scalar r = std::hypot(phi.grid.x1(i), phi.grid.x2(i));
    if (r > 1.0 + phi.grid.spacing()) outside = std::max(outside, std::abs(phi.samples(i)));
  }
  if (outside > 1e-12)
    throw std::invalid_argument("atomic_decompose: phi is not supported in the unit ball");
  if (std::abs(phi_mean) * phi.grid.cell_volume() > mean_tol)
    throw std::invalid_argument("atomic_decompose: phi must have vanishing mean");

  const Scalar w = std::log(2.0);  // dt/t weight of one dyadic level
  AtomicDecomposition dec;
  ArrayXXc direct = ArrayXXc::Zero(g.size(), h.front().target.m);
  const Index zero_index = g.n / 2;  // grid index of x = 0

  for (std::size_t li = 0; li < h.size(); ++li) {
    const Field& hf = h[li];
    if (hf.grid != g) throw std::invalid_argument("atomic_decompose: fields on mixed grids");
    const int k = levels[li];
    const Scalar t = std::ldexp(1.0, -k);
    if (t < hs || k < 0)
      throw std::invalid_argument("atomic_decompose: level outside grid resolution");
    const Index cube_cells = static_cast<Index>(std::round(t / hs));
    const Index window = cube_cells;  // support radius of phi_t in cells
    const Index cells = static_cast<Index>(1) << k;

    const ArrayX hnorms = hf.norms();
    for (Index i = 0; i < g.size(); ++i) {
      const Scalar x = g.x1(i);
      if ((x < -1e-12 || x >= 1 - 1e-12) && hnorms(i) > 0)
        throw std::invalid_argument("atomic_decompose: h not supported in the unit cube");
    }

    for (Index j = 0; j < cells; ++j) {
      const Index ylo = zero_index + j * cube_cells;
      Scalar lambda_q = 0;
      for (Index y = ylo; y < ylo + cube_cells; ++y)
        lambda_q += std::pow(hf.target.norm_row(hf.values, y), qexp);
      lambda_q *= w * g.cell_volume();
      const Scalar lambda = std::pow(lambda_q, 1.0 / qexp);

      AtomicEntry entry;
      entry.cube.d = 1;
      entry.cube.level = k;
      entry.cube.j0 = j;
      entry.lambda = lambda;
      entry.atom = Field(g, hf.target);
      for (Index y = ylo; y < ylo + cube_cells; ++y) {
        for (Index x = std::max<Index>(0, y - window); x <= std::min<Index>(g.n - 1, y + window);
             ++x) {
          const Complex pv = phi.value((g.axis_coord(y) - g.axis_coord(x)) / t) / t;
          if (pv == Complex(0, 0)) continue;
          for (Index c = 0; c < hf.target.m; ++c) {
            const Complex contrib = pv * hf.values(y, c) * w * g.cell_volume();
            entry.atom.values(x, c) += contrib;
            direct(x, c) += contrib;
          }
        }
      }
      if (lambda <= 0) continue;  // empty tent
      entry.atom.values /= lambda;
      dec.energy_lhs += lambda_q;
      dec.entries.push_back(std::move(entry));
    }
    dec.energy_rhs += hf.norms().pow(qexp).sum() * g.cell_volume() * w;
  }

  // reconstruction against the direct double sum
  ArrayXXc recon = ArrayXXc::Zero(g.size(), h.front().target.m);
  for (const auto& e : dec.entries) recon += e.lambda * e.atom.values;
  ArrayXXc gap = recon - direct;
  dec.reconstruction_error = h.front().target.norms(gap).maxCoeff();
  return dec;
}

// ---------------------------------------------------------------------------
// Boolean martingales

BooleanMartingale random_martingale(Index depth, const VectorTarget& target, Rng& rng) {
  BooleanMartingale m;
  m.depth = depth;
  m.target = target;
  for (Index k = 1; k <= depth; ++k) {
    ArrayXXc tab(static_cast<Index>(1) << (k - 1), target.m);
    for (Index r = 0; r < tab.rows(); ++r)
      for (Index c = 0; c < target.m; ++c) tab(r, c) = rng.cnormal();
    m.diffs.push_back(std::move(tab));
  }
  return m;
}

BooleanMartingale stopped_walk(Index depth) {
  if (depth < 4 || depth % 2 != 0)
    throw std::invalid_argument("stopped_walk: even depth >= 4 required");
  BooleanMartingale m;
  m.depth = depth;
  m.target = VectorTarget(2.0, 1);
  for (Index k = 1; k <= depth; ++k) {
    ArrayXXc tab(static_cast<Index>(1) << (k - 1), 1);
    for (Index w = 0; w < tab.rows(); ++w) {
      long long s = 0;
      bool alive = true;
      for (Index i = 0; i < k - 1; ++i) {
        s += (w >> i) & 1 ? 1 : -1;
        if (std::abs(s) >= 2) {
          alive = false;
          break;
        }
      }
      tab(w, 0) = alive ? 1.0 : 0.0;
    }
    m.diffs.push_back(std::move(tab));
  }
  return m;
}

Scalar stopped_walk_tau_probability(Index depth, Index j) {
  if (j < 1 || j >= depth) throw std::invalid_argument("tau probability: 1 <= j < depth");
  const BooleanMartingale m = stopped_walk(depth);
  auto survival = [&](Index k) {  // P(tau >= k)
    return m.table(k).real().sum() / static_cast<Scalar>(m.table(k).rows());
  };
  return survival(j) - survival(j + 1);
}

CotypeSample cotype_ratio(const BooleanMartingale& m, Scalar q) {
  CotypeSample out;
  Scalar num_q = 0;
  for (Index k = 1; k <= m.depth; ++k) {
    const ArrayXXc& tab = m.table(k);
    num_q += m.target.norms(tab).pow(q).sum() / static_cast<Scalar>(tab.rows());
  }
  out.numerator = std::pow(num_q, 1.0 / q);

  // sup_n E||f_n||^q by a level-by-level tree walk
  ArrayXXc values(1, m.target.m);
  values.setZero();
  Scalar sup = 0;
  for (Index k = 1; k <= m.depth; ++k) {
    const ArrayXXc& tab = m.table(k);
    ArrayXXc next(values.rows() * 2, m.target.m);
    for (Index w = 0; w < values.rows(); ++w) {
      next.row(w) = values.row(w) - tab.row(w);                  // eps_k = -1
      next.row(w + values.rows()) = values.row(w) + tab.row(w);  // eps_k = +1
    }
    values.swap(next);
    const Scalar e = m.target.norms(values).pow(q).sum() / static_cast<Scalar>(values.rows());
    sup = std::max(sup, e);
  }
  out.denominator = std::pow(sup, 1.0 / q);
  out.ratio = out.denominator > 0 ? out.numerator / out.denominator : 0.0;
  return out;
}

ConstantEstimate cotype_estimate(const VectorTarget& target, Scalar q,
                                 const std::function<BooleanMartingale(Rng&, Index)>& generator,
                                 Index depth, Index sample_count, std::uint64_t seed) {
  if (depth > 20) throw std::invalid_argument("cotype_estimate: depth capped at 20");
  ConstantEstimate est;
  est.p = q;
  est.q = q;
  est.r = target.r;
  est.m = target.m;
  est.family = "boolean-martingales";
  est.seed = seed;
  est.n = depth;
  est.d = 0;
  for (Index i = 0; i < sample_count; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const BooleanMartingale m = generator(rng, depth);
    const CotypeSample s = cotype_ratio(m, q);
    if (s.denominator <= 0) {
      ++est.skipped;
      continue;
    }
    ++est.samples_used;
    if (s.ratio > est.estimate) {
      est.estimate = s.ratio;
      std::ostringstream label;
      label << "martingale sample " << i;
      est.argmax_label = label.str();
    }
  }
  return est;
}

// ---------------------------------------------------------------------------
// Walsh semigroup

void walsh_hadamard(ArrayXXc& values) {
  const Index n = values.rows();
  if (!is_pow2(n)) throw std::invalid_argument("walsh_hadamard: power-of-two length required");
  for (Index c = 0; c < values.cols(); ++c) {
    Complex* v = values.col(c).data();
    for (Index len = 1; len < n; len *= 2)
      for (Index i = 0; i < n; i += 2 * len)
        for (Index j = i; j < i + len; ++j) {
          const Complex a = v[j], b = v[j + len];
          v[j] = a + b;
          v[j + len] = a - b;
        }
  }
}

ArrayXXc walsh_apply(const ArrayXXc& values, Scalar t) {
  if (t < 0) throw std::invalid_argument("walsh_apply: t >= 0 required");
  ArrayXXc coeff = values;
  walsh_hadamard(coeff);
  const Index n = coeff.rows();
  coeff /= static_cast<Scalar>(n);
  std::vector<Scalar> factor(65);  // e^{-t |A|} by character size
  for (int sz = 0; sz <= 64; ++sz) factor[sz] = std::exp(-t * sz);
  for (Index a = 0; a < n; ++a)
    coeff.row(a) *= factor[std::popcount(static_cast<std::uint64_t>(a))];
  walsh_hadamard(coeff);
  return coeff;
}

WalshGResult walsh_g(const ArrayXXc& values, const VectorTarget& target, Scalar q,
                     const LogTimeGrid& tgrid, Scalar tail_tol) {
  ArrayXXc coeff = values;
  walsh_hadamard(coeff);
  const Index n = coeff.rows();
  coeff /= static_cast<Scalar>(n);

  const bool use_max = std::isinf(q);
  ArrayX acc = ArrayX::Zero(n);
  Scalar first_energy = 0, last_energy = 0, total = 0;
  ArrayXXc level(n, coeff.cols());
  std::vector<Scalar> factor(65);  // -t|A| e^{-t|A|} by character size
  for (Index jn = 0; jn < tgrid.count; ++jn) {
    const Scalar t = tgrid.node(jn);
    for (int sz = 0; sz <= 64; ++sz) factor[sz] = -t * sz * std::exp(-t * sz);
    if (coeff.cols() == 1) {
      const Complex* src = coeff.col(0).data();
      Complex* dst = level.col(0).data();
      for (Index a = 0; a < n; ++a)
        dst[a] = src[a] * factor[std::popcount(static_cast<std::uint64_t>(a))];
    } else {
      for (Index a = 0; a < n; ++a)
        level.row(a) = coeff.row(a) * factor[std::popcount(static_cast<std::uint64_t>(a))];
    }
    walsh_hadamard(level);
    const ArrayX norms = target.norms(level);
    if (use_max) {
      acc = acc.max(norms);
    } else {
      const ArrayX powed = norms.pow(q) * tgrid.weight();
      acc += powed;
      const Scalar e = powed.sum();
      total += e;
      if (jn == 0) first_energy = e;
      if (jn == tgrid.count - 1) last_energy = e;
    }
  }
  WalshGResult out;
  out.values = use_max ? acc : ArrayX(acc.pow(1.0 / q));
  out.flagged = total > 0 && (first_energy / total > tail_tol || last_energy / total > tail_tol);
  return out;
}

}  // namespace lps
