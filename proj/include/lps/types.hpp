// Core dense types: uniform periodic grids, finite-dimensional targets,
// sampled vector-valued fields and logarithmic time grids for dt/t.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>

namespace lps {

using Scalar   = double;
using Complex  = std::complex<Scalar>;
using Index    = Eigen::Index;
using ArrayX   = Eigen::ArrayXd;
using ArrayXc  = Eigen::ArrayXcd;
using ArrayXXc = Eigen::ArrayXXcd;

inline constexpr Scalar kPi = 3.14159265358979323846;
inline constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

inline bool is_pow2(Index n) { return n > 0 && (n & (n - 1)) == 0; }

enum class GridOrigin { Centered, ZeroBased };

// Uniform grid on [-L, L)^d (Centered) or [0, 2L)^d (ZeroBased), N points
// per axis, N a power of two. Flat index for d=2 is ix*N + iy.
struct GridSpec {
  int d = 1;
  Scalar half_width = 1.0;
  Index n = 16;
  GridOrigin origin = GridOrigin::Centered;

  GridSpec() = default;
  GridSpec(int d_, Scalar half_width_, Index n_,
           GridOrigin origin_ = GridOrigin::Centered)
      : d(d_), half_width(half_width_), n(n_), origin(origin_) {
    if (d != 1 && d != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
    if (!(half_width > 0)) throw std::invalid_argument("grid half_width must be positive");
    if (!is_pow2(n) || n < 16) throw std::invalid_argument("N must be a power of two >= 16");
  }

  Scalar spacing() const { return 2 * half_width / static_cast<Scalar>(n); }
  Scalar cell_volume() const { return d == 1 ? spacing() : spacing() * spacing(); }
  Index size() const { return d == 1 ? n : n * n; }

  Scalar axis_coord(Index i) const {
    const Scalar h = spacing();
    return origin == GridOrigin::Centered ? -half_width + h * static_cast<Scalar>(i)
                                          : h * static_cast<Scalar>(i);
  }
  // Signed displacement of axis index i from the origin, wrapped periodically.
  Scalar axis_offset(Index i) const {
    const Scalar h = spacing();
    return (i <= n / 2 ? static_cast<Scalar>(i) : static_cast<Scalar>(i - n)) * h;
  }
  Index ix(Index flat) const { return d == 1 ? flat : flat / n; }
  Index iy(Index flat) const { return d == 1 ? 0 : flat % n; }
  Scalar x1(Index flat) const { return axis_coord(ix(flat)); }
  Scalar x2(Index flat) const { return d == 1 ? 0.0 : axis_coord(iy(flat)); }

  bool operator==(const GridSpec& o) const {
    return d == o.d && half_width == o.half_width && n == o.n && origin == o.origin;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

// The target space X = l_r^m; the norm of v in C^m is the l_r norm of its
// coordinate moduli.
struct VectorTarget {
  Scalar r = 2.0;
  Index m = 1;

  VectorTarget() = default;
  VectorTarget(Scalar r_, Index m_) : r(r_), m(m_) {
    if (!(r >= 1)) throw std::invalid_argument("target exponent r must be >= 1");
    if (m < 1) throw std::invalid_argument("target dimension m must be >= 1");
  }

  Scalar norm_row(const ArrayXXc& vals, Index row) const {
    if (m == 1) return std::abs(vals(row, 0));
    if (r == 2.0) {
      Scalar s = 0;
      for (Index c = 0; c < m; ++c) s += std::norm(vals(row, c));
      return std::sqrt(s);
    }
    if (std::isinf(r)) {
      Scalar s = 0;
      for (Index c = 0; c < m; ++c) s = std::max(s, std::abs(vals(row, c)));
      return s;
    }
    Scalar s = 0;
    for (Index c = 0; c < m; ++c) s += std::pow(std::abs(vals(row, c)), r);
    return std::pow(s, 1.0 / r);
  }

  // Pointwise X-norms of an (n_points x m) value array.
  ArrayX norms(const ArrayXXc& vals) const {
    ArrayX out(vals.rows());
    if (m == 1) {
      out = vals.col(0).abs();
    } else if (r == 2.0) {
      out = vals.abs2().rowwise().sum().sqrt();
    } else if (std::isinf(r)) {
      out = vals.abs().rowwise().maxCoeff();
    } else {
      out = vals.abs().pow(r).rowwise().sum().pow(1.0 / r);
    }
    return out;
  }

  bool operator==(const VectorTarget& o) const { return r == o.r && m == o.m; }
};

// A function R^d -> C^m sampled on a grid; rows are grid points, columns the
// m target coordinates.
struct Field {
  GridSpec grid;
  VectorTarget target;
  ArrayXXc values;

  Field() = default;
  Field(GridSpec g, VectorTarget t)
      : grid(g), target(t), values(ArrayXXc::Zero(g.size(), t.m)) {}
  Field(GridSpec g, VectorTarget t, ArrayXXc v)
      : grid(g), target(t), values(std::move(v)) {
    if (values.rows() != grid.size() || values.cols() != target.m)
      throw std::invalid_argument("field value shape does not match grid/target");
  }

  bool all_finite() const { return values.isFinite().all(); }
  ArrayX norms() const { return target.norms(values); }
};

// Sample a scalar (m=1) function on a grid.
inline Field sample_scalar(const GridSpec& g, const std::function<Complex(Scalar, Scalar)>& f) {
  Field out(g, VectorTarget(2.0, 1));
  for (Index i = 0; i < g.size(); ++i) out.values(i, 0) = f(g.x1(i), g.x2(i));
  return out;
}

// Sample a scalar function of the periodic displacement from the origin; the
// result is laid out so that index 0 carries argument 0 (wrapped layout).
inline ArrayXc sample_offset_kernel(const GridSpec& g,
                                    const std::function<Complex(Scalar, Scalar)>& f) {
  ArrayXc out(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const Scalar u = g.axis_offset(g.ix(i));
    const Scalar v = g.d == 1 ? 0.0 : g.axis_offset(g.iy(i));
    out(i) = f(u, v);
  }
  return out;
}

// Geometric time grid for the measure dt/t: K nodes from t_min to t_max with
// ratio rho = (t_max/t_min)^(1/(K-1)); every node carries weight log(rho)
// (midpoint rule in log t).
struct LogTimeGrid {
  Scalar t_min = 1.0;
  Scalar t_max = 2.0;
  Index count = 2;

  LogTimeGrid() = default;
  LogTimeGrid(Scalar t_min_, Scalar t_max_, Index count_)
      : t_min(t_min_), t_max(t_max_), count(count_) {
    if (!(t_min > 0) || !(t_min < t_max))
      throw std::invalid_argument("time grid requires 0 < t_min < t_max");
    if (count < 2) throw std::invalid_argument("time grid requires K >= 2");
  }

  static LogTimeGrid per_decade(Scalar t_min, Scalar t_max, Index points_per_decade) {
    const Scalar decades = std::log10(t_max / t_min);
    const Index k = std::max<Index>(2, static_cast<Index>(std::ceil(decades * points_per_decade)) + 1);
    return LogTimeGrid(t_min, t_max, k);
  }

  Scalar ratio() const { return std::pow(t_max / t_min, 1.0 / static_cast<Scalar>(count - 1)); }
  Scalar log_ratio() const { return std::log(t_max / t_min) / static_cast<Scalar>(count - 1); }
  Scalar node(Index j) const { return t_min * std::exp(log_ratio() * static_cast<Scalar>(j)); }
  Scalar weight() const { return log_ratio(); }

  LogTimeGrid scaled(Scalar factor) const { return LogTimeGrid(t_min * factor, t_max * factor, count); }
};

}  // namespace lps
