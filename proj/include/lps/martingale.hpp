// Dyadic-martingale machinery: conditional expectations and square functions
// on the unit cube, the 3Q splitting into dyadic-like families, smooth atoms
// and the tent decomposition, Boolean martingales (including the stopped
// random walk) with exact-enumeration cotype estimation, and the Walsh
// semigroup as an exact finite model.
#pragma once

#include "lps/gfunc.hpp"
#include "lps/kernels.hpp"
#include "lps/rng.hpp"
#include "lps/types.hpp"

#include <vector>

namespace lps {

// dyadic cube prod_i [j_i 2^{-k}, (j_i + 1) 2^{-k})
struct DyadicCube {
  int d = 1;
  int level = 0;
  long long j0 = 0, j1 = 0;

  Scalar side() const { return std::ldexp(1.0, -level); }
  Scalar lo(int axis) const { return (axis == 0 ? j0 : j1) * side(); }
  Scalar volume() const { return std::pow(side(), d); }
  DyadicCube parent() const {
    DyadicCube p = *this;
    --p.level;
    p.j0 = j0 >= 0 ? j0 / 2 : (j0 - 1) / 2;
    p.j1 = j1 >= 0 ? j1 / 2 : (j1 - 1) / 2;
    return p;
  }
};

// Interval [(3j+s) 2^{-k}, (3(j+1)+s) 2^{-k}); the tripled cubes 3Q in d = 1
// are exactly these.
struct ThreeQInterval {
  int level = 0;
  long long j = 0;
  int shift = 0;  // s in {0, 1, 2}

  long long start_index() const { return 3 * j + shift; }
  Scalar lo() const { return static_cast<Scalar>(start_index()) * std::ldexp(1.0, -level); }
  Scalar length() const { return 3 * std::ldexp(1.0, -level); }
};

// A dyadic-like (good) family: either the plain dyadic grid or one of the
// three 3Q families per axis. Membership of a 3Q interval at level k is
// shift == (2^{|k|} * selector) mod 3.
struct DyadicLikeFamily {
  enum class Kind { Dyadic, ThreeQ };
  Kind kind = Kind::Dyadic;
  int d = 1;
  int selector0 = 0, selector1 = 0;

  static int three_q_shift(int level, int selector) {
    const int pow = (std::abs(level) % 2 == 0) ? 1 : 2;  // 2^|k| mod 3
    return (pow * selector) % 3;
  }
  bool contains(const ThreeQInterval& q, int axis = 0) const {
    return kind == Kind::ThreeQ &&
           q.shift == three_q_shift(q.level, axis == 0 ? selector0 : selector1);
  }
};

// Splits {3Q} over the given level/index ranges into the 3^d families of the
// partition lemma; every tripled cube lands in exactly one family.
std::vector<DyadicLikeFamily> three_q_partition(int d);
// Family membership of the tripled cube 3Q for a dyadic interval index.
ThreeQInterval three_q_of(int level, long long j);
int three_q_family_of(const ThreeQInterval& q);

// Verifies the good-family axioms (children closure, parent existence,
// nesting trichotomy) for one family over a finite truncation; returns the
// number of violations.
struct FamilyAxiomReport {
  long long children_violations = 0;
  long long parent_violations = 0;
  long long nesting_violations = 0;
  bool ok() const { return !children_violations && !parent_violations && !nesting_violations; }
};
FamilyAxiomReport check_family_axioms(const DyadicLikeFamily& fam, int kmin, int kmax,
                                      long long jmax);

// ---------------------------------------------------------------------------
// Conditional expectations on the unit cube. Fields live on a zero-based
// grid covering [0,1)^d; levels k <= 0 give the global mean.

Field cond_expect(const Field& f, int k);
// (sum_{k in [kmin, kmax]} ||E_k f - E_{k-1} f||_X^q)^{1/q}
Field square_fn(const Field& f, Scalar q, int kmin, int kmax);
// Square function over a dyadic-like family: differences of averages between
// members and their member children, summed over the levels [kmin, kmax).
Field family_square_fn(const Field& f, const DyadicLikeFamily& fam, Scalar q, int kmin, int kmax);

// ---------------------------------------------------------------------------
// Smooth atoms and the tent decomposition

struct AtomReport {
  Scalar outside_support = 0;   // sup ||a|| outside the cube (one cell of slack)
  Scalar mean_abs = 0;          // |discrete integral|
  Scalar holder_constant = 0;   // smallest C with ||a(x)-a(y)|| <= C |Q|^{-1/q} (|x-y|/l(Q))^delta
};

struct Cube {
  int d = 1;
  Scalar lo0 = 0, lo1 = 0;
  Scalar side = 1;
  bool contains(Scalar x, Scalar y, Scalar slack = 0) const {
    if (x < lo0 - slack || x >= lo0 + side + slack) return false;
    return d == 1 || (y >= lo1 - slack && y < lo1 + side + slack);
  }
};

AtomReport atom_check(const Field& a, const Cube& q, Scalar qexp, Scalar delta,
                      Index pair_samples = 4000, std::uint64_t seed = 1);

struct AtomicEntry {
  DyadicCube cube;
  Scalar lambda = 0;
  Field atom;  // supported in 3Q
};

struct AtomicDecomposition {
  std::vector<AtomicEntry> entries;
  Scalar energy_lhs = 0;           // sum lambda_Q^q
  Scalar energy_rhs = 0;           // ||h||_q^q in the discrete tent measure
  Scalar reconstruction_error = 0; // sup-norm gap against direct evaluation
};

// h is one field per dyadic time level t = 2^{-k} (levels[i] = k_i), all on a
// common centered grid containing the unit cube; phi must lie in H^0_delta
// (unit-ball support, Holder, zero discrete mean).
AtomicDecomposition atomic_decompose(const std::vector<Field>& h, const std::vector<int>& levels,
                                     const HolderKernel& phi, Scalar qexp,
                                     Scalar mean_tol = 1e-8);

// ---------------------------------------------------------------------------
// Boolean martingales

// f_n = sum_{k<=n} d_k(eps_1..eps_{k-1}) eps_k; table k has 2^{k-1} rows,
// indexed by the bits (eps_i + 1)/2 with eps_1 as the lowest bit.
struct BooleanMartingale {
  Index depth = 0;
  VectorTarget target;
  std::vector<ArrayXXc> diffs;  // diffs[k-1]: 2^{k-1} x m

  const ArrayXXc& table(Index k) const { return diffs[k - 1]; }
};

BooleanMartingale random_martingale(Index depth, const VectorTarget& target, Rng& rng);
// simple random walk stopped on leaving (-2, 2): d_k = 1_{tau >= k}
BooleanMartingale stopped_walk(Index depth);

// P(tau = j) for the stopped walk by exact enumeration of one table level.
Scalar stopped_walk_tau_probability(Index depth, Index j);

struct CotypeSample {
  Scalar ratio = 0;  // (sum_k E||d_k||^q)^{1/q} / sup_n (E||f_n||^q)^{1/q}
  Scalar numerator = 0;
  Scalar denominator = 0;
};

CotypeSample cotype_ratio(const BooleanMartingale& mart, Scalar q);

ConstantEstimate cotype_estimate(const VectorTarget& target, Scalar q,
                                 const std::function<BooleanMartingale(Rng&, Index)>& generator,
                                 Index depth, Index sample_count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Walsh semigroup on {-1,1}^K: T_t w_A = e^{-t|A|} w_A

// in-place fast Walsh-Hadamard transform of each column (unnormalized)
void walsh_hadamard(ArrayXXc& values);
ArrayXXc walsh_apply(const ArrayXXc& values, Scalar t);

struct WalshGResult {
  ArrayX values;  // per point of {-1,1}^K
  bool flagged = false;
};

WalshGResult walsh_g(const ArrayXXc& values, const VectorTarget& target, Scalar q,
                     const LogTimeGrid& tgrid, Scalar tail_tol = 1e-6);

}  // namespace lps
