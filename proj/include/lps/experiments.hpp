// Scripted desk-scale verifications: the subordination identity, pointwise
// domination of the Poisson g-function, both optimality lower bounds, the
// growth-order scan, maximal translation averages and the lacunary
// discretization equivalence. Every experiment is a pure function of its
// options and seed.
#pragma once

#include "lps/gfunc.hpp"
#include "lps/martingale.hpp"
#include "lps/quadrature.hpp"

#include <string>
#include <vector>

namespace lps {

struct ReportRow {
  std::string label;
  Scalar p = 0, q = 0, r = 0;
  Index m = 1;
  Scalar value = 0;
  Scalar reference = 0;
  Scalar ratio = 0;
};

struct NamedFit {
  std::string name;
  FitResult fit;
};

struct NamedCheck {
  std::string name;
  bool pass = true;
  Scalar value = 0;
};

struct ExperimentReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<ReportRow> rows;
  std::vector<NamedFit> fits;
  std::vector<NamedCheck> checks;
  bool pass = true;
  Scalar wall_seconds = 0;
  std::uint64_t seed = 0;

  void check(const std::string& name, bool ok, Scalar value);
  void param(const std::string& key, const std::string& value);
  void param(const std::string& key, Scalar value);
};

// ---------------------------------------------------------------------------

struct SubordinationOptions {
  Scalar half_width = 256;
  Index n = 1 << 14;
  Index t_count = 9;  // log-spaced in [1/4, 4]
  Scalar x_window = 64;
  Scalar rel_tol = 1e-4;
  bool with_2d_variant = true;
};
ExperimentReport exp_subordination(const SubordinationOptions& opt = {});

struct DominationOptions {
  Scalar q = 2;
  Scalar half_width = 256;
  Index n = 1 << 13;
  // Subordination maps the Poisson scale t to heat scales near t^2, so the
  // heat-side window is roughly the square of the Poisson one, and the
  // comparison is made where the box represents both sides (|x| <= x_window).
  Scalar t_min = std::ldexp(1.0, -22), t_max = std::ldexp(1.0, 12);
  Scalar heat_t_max = std::ldexp(1.0, 26);
  Scalar x_window = 128;
  Index points_per_decade = 24;
  Scalar slack = 1e-6;
  std::uint64_t seed = 2024;
};
ExperimentReport exp_pointwise_domination(const DominationOptions& opt = {});

struct LowerPPrimeOptions {
  Scalar q = 2;
  std::vector<Scalar> p_grid = {1.05, 1.1, 1.15, 1.2, 1.3, 1.4, 1.5};
  Scalar x_max = 1e40;  // reach of the x-quadrature for the L_p norms
  Scalar slope_lo = 0.85, slope_hi = 1.15;
};
ExperimentReport exp_lower_pprime(const LowerPPrimeOptions& opt = {});

struct LowerP1qOptions {
  Scalar q = 2;
  std::vector<Scalar> p_grid = {8, 12, 16, 24, 32, 48, 64, 96, 128};
  Index terms = 80;  // J
  Index mc_samples = 200000;
  std::uint64_t seed = 7;
  Scalar slope_band = 0.15;
};
ExperimentReport exp_lower_p1q(const LowerP1qOptions& opt = {});

struct MlbisOptions {
  Scalar q = 2;
  // the slope is a p -> 1 growth order; the grid sits near 1 and t_max covers
  // the slow t^{-q/p'} tail of the integrand
  std::vector<Scalar> p_grid = {1.004, 1.006, 1.009, 1.013, 1.019, 1.028};
  Scalar t_min = 1e-10, t_max = 1e160;
  Index points_per_decade = 24;
  Scalar band_factor = 2.0;  // anchored band around t/(t+1)^{1+1/p'}
  Scalar slope_band = 0.15;
};
ExperimentReport exp_mlbis(const MlbisOptions& opt = {});

struct GrowthOptions {
  Scalar q = 2;
  Scalar target_r = 2;
  Index target_m = 1;
  std::vector<Scalar> p_grid = {1.1, 1.5, 2, 3, 4, 8, 16, 32, 64};
  Scalar half_width = 256;
  Index n = 1 << 13;
  Scalar t_min = std::ldexp(1.0, -12), t_max = std::ldexp(1.0, 12);
  Index points_per_decade = 24;
  Index members_per_family = 4;
  Scalar bound_factor = 10;  // max/min of the normalized curve
  std::uint64_t seed = 11;
  int jobs = 1;
};
ExperimentReport exp_fml_growth(const GrowthOptions& opt = {});

struct ErgodicMaximalOptions {
  std::vector<Scalar> p_grid = {1.1, 1.5, 2, 4, 8, 16, 32, 64};
  Scalar half_width = 64;
  Index n = 1 << 12;
  std::uint64_t seed = 5;
};
ExperimentReport exp_ergodic_maximal(const ErgodicMaximalOptions& opt = {});

struct LacunaryEquivOptions {
  Scalar q = 2;
  Scalar a = 2;
  Scalar p = 2;
  Scalar half_width = 256;
  Index n = 1 << 13;
  Scalar band = 10;  // common interval [1/C, C]
  std::uint64_t seed = 23;
};
ExperimentReport exp_lacunary_equiv(const LacunaryEquivOptions& opt = {});

// registry for the CLI
std::vector<std::string> experiment_names();
ExperimentReport run_experiment_by_name(const std::string& name);

}  // namespace lps
