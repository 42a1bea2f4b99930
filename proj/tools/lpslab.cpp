// Command-line entry point: configuration, experiment dispatch, deterministic
// seeding and output emission. Exit codes: 0 all checks passed, 1 tolerance
// failure, 2 input error.

#include "lps/config.hpp"
#include "lps/experiments.hpp"
#include "lps/io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <bit>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace lps;

namespace {

struct FlagSet {
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string config_path;

  RunConfig resolve() const {
    std::string content;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot read config file " + config_path);
      std::ostringstream ss;
      ss << in.rdbuf();
      content = ss.str();
    }
    return parse_config(content, overrides);
  }
};

void add_config_flags(CLI::App* cmd, FlagSet& flags) {
  cmd->add_option("--config", flags.config_path, "key = value configuration file");
  auto capture = [&flags](const std::string& key) {
    return [&flags, key](const std::string& value) { flags.overrides.emplace_back(key, value); };
  };
  for (const char* key : {"d", "L", "N", "t-min", "t-max", "points-per-decade", "p", "q", "r",
                          "m", "kernel", "semigroup", "family", "samples", "depth", "seed",
                          "out", "jobs"}) {
    cmd->add_option_function<std::string>(std::string("--") + key, capture(key));
  }
  cmd->add_option_function<std::vector<std::string>>(
      "--tol",
      [&flags](const std::vector<std::string>& pairs) {
        for (const auto& kv : pairs) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) throw CLI::ValidationError("--tol expects key=value");
          flags.overrides.emplace_back("tol." + kv.substr(0, eq), kv.substr(eq + 1));
        }
      },
      "tolerance overrides key=value");
}

void emit(const RunConfig& cfg, const std::string& name, const std::string& csv, const json& j,
          const json* plot = nullptr) {
  fs::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/config.echo", cfg.echo());
  write_text_file(cfg.out_dir + "/" + name + ".csv", csv);
  write_text_file(cfg.out_dir + "/" + name + ".json", j.dump(2) + "\n");
  if (plot) write_text_file(cfg.out_dir + "/" + name + ".plot.json", plot->dump(2) + "\n");
}

Scalar tol_or(const RunConfig& cfg, const std::string& key, Scalar fallback) {
  const auto it = cfg.tolerances.find(key);
  return it == cfg.tolerances.end() ? fallback : it->second;
}

bool user_p_list(const RunConfig& cfg) {
  return cfg.p_list.size() > 1 || cfg.p_list[0] != 2.0;
}

int run_experiment(const RunConfig& cfg, const std::string& name, Scalar lacunary_a) {
  ExperimentReport rep;
  if (name == "subordination") {
    SubordinationOptions opt;
    opt.half_width = cfg.half_width;
    opt.n = cfg.n;
    opt.rel_tol = tol_or(cfg, "rel", 1e-4);
    rep = exp_subordination(opt);
  } else if (name == "pointwise-domination") {
    DominationOptions opt;
    opt.q = cfg.q;
    opt.half_width = cfg.half_width;
    opt.n = cfg.n;
    opt.t_min = cfg.t_min;
    opt.t_max = cfg.t_max;
    opt.points_per_decade = cfg.points_per_decade;
    opt.slack = tol_or(cfg, "slack", 1e-6);
    opt.seed = cfg.seed ? cfg.seed : DominationOptions{}.seed;
    rep = exp_pointwise_domination(opt);
  } else if (name == "lower-pprime") {
    LowerPPrimeOptions opt;
    opt.q = cfg.q;
    if (user_p_list(cfg)) opt.p_grid = cfg.p_list;
    rep = exp_lower_pprime(opt);
  } else if (name == "lower-p1q") {
    LowerP1qOptions opt;
    opt.q = cfg.q;
    if (user_p_list(cfg)) opt.p_grid = cfg.p_list;
    if (cfg.samples >= 1000) opt.mc_samples = cfg.samples;
    opt.seed = cfg.seed ? cfg.seed : LowerP1qOptions{}.seed;
    rep = exp_lower_p1q(opt);
  } else if (name == "mlbis") {
    MlbisOptions opt;
    opt.q = cfg.q;
    if (user_p_list(cfg)) opt.p_grid = cfg.p_list;
    rep = exp_mlbis(opt);
  } else if (name == "fml-growth") {
    GrowthOptions opt;
    opt.q = cfg.q;
    opt.target_r = cfg.target_r;
    opt.target_m = cfg.target_m;
    if (user_p_list(cfg)) opt.p_grid = cfg.p_list;
    opt.half_width = cfg.half_width;
    opt.n = cfg.n;
    opt.t_min = cfg.t_min;
    opt.t_max = cfg.t_max;
    opt.points_per_decade = cfg.points_per_decade;
    opt.bound_factor = tol_or(cfg, "bound", 10.0);
    opt.seed = cfg.seed ? cfg.seed : GrowthOptions{}.seed;
    opt.jobs = cfg.jobs;
    rep = exp_fml_growth(opt);
  } else if (name == "ergodic-maximal") {
    ErgodicMaximalOptions opt;
    if (user_p_list(cfg)) opt.p_grid = cfg.p_list;
    opt.half_width = cfg.half_width;
    opt.n = cfg.n;
    opt.seed = cfg.seed ? cfg.seed : ErgodicMaximalOptions{}.seed;
    rep = exp_ergodic_maximal(opt);
  } else if (name == "lacunary-equiv") {
    LacunaryEquivOptions opt;
    opt.q = cfg.q;
    opt.a = lacunary_a;
    opt.p = cfg.p_list[0];
    opt.half_width = cfg.half_width;
    opt.n = cfg.n;
    opt.band = tol_or(cfg, "band", 10.0);
    opt.seed = cfg.seed ? cfg.seed : LacunaryEquivOptions{}.seed;
    rep = exp_lacunary_equiv(opt);
  } else {
    throw std::invalid_argument("unknown experiment: " + name);
  }
  const json plot = plot_json(rep);
  emit(cfg, rep.name, report_csv(rep), report_json(rep), &plot);
  std::cout << rep.name << (rep.pass ? ": pass" : ": FAIL") << " (" << rep.wall_seconds << " s)\n";
  return rep.pass ? 0 : 1;
}

HolderKernel build_kernel(const RunConfig& cfg) {
  GridSpec g(cfg.d, cfg.half_width, cfg.n);
  if (cfg.kernel == "phi") return phi_kernel(g);
  return dt_poisson_holder_kernel(g);
}

int run_kernels_check(const RunConfig& cfg) {
  const HolderKernel k = build_kernel(cfg);
  const HolderReport hr = holder_check(k, 20000, cfg.seed + 1);
  LogTimeGrid tg = LogTimeGrid::per_decade(cfg.t_min, cfg.t_max, cfg.points_per_decade);
  const HormanderReport reg = hormander_check(k, cfg.q, tg, 64, 8, cfg.seed + 2);
  json j;
  j["kernel"] = k.name;
  j["eps"] = k.eps;
  j["delta"] = k.delta;
  j["holder"] = {{"size_constant", hr.size_constant},
                 {"smoothness_constant", hr.smoothness_constant},
                 {"mean_constant", hr.mean_constant}};
  j["hormander"] = {{"size_sup", reg.size_sup}, {"smoothness_sup", reg.smoothness_sup}};
  std::ostringstream csv;
  csv << "kernel,eps,delta,holder_size,holder_smoothness,holder_mean,hormander_size,"
         "hormander_smoothness\n";
  csv << k.name << ',' << format_scalar(k.eps) << ',' << format_scalar(k.delta) << ','
      << format_scalar(hr.size_constant) << ',' << format_scalar(hr.smoothness_constant) << ','
      << format_scalar(hr.mean_constant) << ',' << format_scalar(reg.size_sup) << ','
      << format_scalar(reg.smoothness_sup) << '\n';
  emit(cfg, "kernels-check", csv.str(), j);
  const bool finite = std::isfinite(hr.size_constant) && std::isfinite(hr.smoothness_constant) &&
                      std::isfinite(reg.size_sup) && std::isfinite(reg.smoothness_sup);
  std::cout << "kernels check " << k.name << (finite ? ": pass" : ": FAIL") << "\n";
  return finite ? 0 : 1;
}

int run_kernels_dump(const RunConfig& cfg, Scalar t) {
  const HolderKernel k = build_kernel(cfg);
  emit(cfg, "kernels-dump", dump_kernel_csv(k, t), json{{"kernel", k.name}, {"t", t}});
  std::cout << "kernels dump " << k.name << " at t = " << t << "\n";
  return 0;
}

int run_gfunc(const RunConfig& cfg, bool via_kernel, bool dump_field) {
  GridSpec g(cfg.d, cfg.half_width, cfg.n);
  VectorTarget target(cfg.target_r, cfg.target_m);
  LogTimeGrid tg = LogTimeGrid::per_decade(cfg.t_min, cfg.t_max, cfg.points_per_decade);

  TestFamily family;
  if (cfg.family == "standard") {
    family = standard_suite(g, cfg.seed);
  } else {
    FamilyKind kind;
    if (cfg.family == "poisson-scales")
      kind = FamilyKind::PoissonScales;
    else if (cfg.family == "heat-scales")
      kind = FamilyKind::HeatScales;
    else if (cfg.family == "gaussian-bumps")
      kind = FamilyKind::GaussianBumps;
    else if (cfg.family == "dyadic-steps")
      kind = FamilyKind::DyadicSteps;
    else if (cfg.family == "trig-polynomials")
      kind = FamilyKind::TrigPolynomials;
    else
      throw std::invalid_argument("unknown family: " + cfg.family);
    family = make_family(kind, g, target, cfg.samples, cfg.seed);
  }

  json estimates = json::array();
  std::ostringstream csv;
  csv << "family,p,q,r,m,estimate,argmax,samples,skipped,seed\n";
  for (Scalar p : cfg.p_list) {
    ConstantEstimate est;
    if (via_kernel) {
      est = estimate_constant(family, build_kernel(cfg), p, cfg.q, tg, cfg.seed);
    } else {
      SemigroupSpec sg = cfg.semigroup == "heat" ? heat_semigroup(cfg.d)
                         : cfg.semigroup == "translation-poisson"
                             ? translation_poisson_semigroup()
                             : poisson_semigroup(cfg.d);
      est = estimate_constant(family, sg, p, cfg.q, tg, cfg.seed);
    }
    estimates.push_back(estimate_json(est));
    std::istringstream body(estimate_csv(est));
    std::string line;
    std::getline(body, line);  // drop the per-estimate header
    std::getline(body, line);
    csv << line << '\n';
  }
  if (dump_field && !family.members.empty()) {
    const Field& f = family.members.front();
    GFunctionResult gres;
    if (via_kernel) {
      gres = g_conv(f, build_kernel(cfg), cfg.q, tg, 1.0);
    } else {
      SemigroupSpec sg = cfg.semigroup == "heat" ? heat_semigroup(cfg.d)
                         : cfg.semigroup == "translation-poisson"
                             ? translation_poisson_semigroup()
                             : poisson_semigroup(cfg.d);
      gres = g_semigroup(f, sg, cfg.q, tg, 1.0);
    }
    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/gfunc-field.csv", field_csv(g, gres.values));
  }
  emit(cfg, "gfunc-run", csv.str(), estimates);
  std::cout << "gfunc run: " << cfg.p_list.size() << " estimates\n";
  return 0;
}

int run_martingale_cotype(const RunConfig& cfg, bool use_stopped_walk, bool dump_mart) {
  VectorTarget target(cfg.target_r, cfg.target_m);
  ConstantEstimate est;
  json extra;
  if (use_stopped_walk) {
    const Index depth = cfg.depth % 2 ? cfg.depth + 1 : cfg.depth;
    est = cotype_estimate(
        target, cfg.q, [](Rng&, Index d) { return stopped_walk(d); }, depth, 1, cfg.seed);
    extra["tau_probabilities"] = json::array();
    for (Index j = 2; j + 1 < depth; j += 2)
      extra["tau_probabilities"].push_back(
          {{"j", j}, {"probability", stopped_walk_tau_probability(depth, j)}});
  } else {
    est = cotype_estimate(
        target, cfg.q,
        [&target](Rng& rng, Index depth) { return random_martingale(depth, target, rng); },
        cfg.depth, cfg.samples, cfg.seed);
  }
  json j = estimate_json(est);
  if (!extra.empty()) j["stopped_walk"] = extra;
  if (dump_mart) {
    const Index depth = cfg.depth % 2 && use_stopped_walk ? cfg.depth + 1 : cfg.depth;
    Rng rng = Rng::stream(cfg.seed, 0);
    const BooleanMartingale m =
        use_stopped_walk ? stopped_walk(depth) : random_martingale(cfg.depth, target, rng);
    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir + "/martingale.json", martingale_json(m).dump(2) + "\n");
  }
  emit(cfg, "martingale-cotype", estimate_csv(est), j);
  std::cout << "martingale cotype estimate: " << est.estimate << "\n";
  return 0;
}

int run_martingale_walsh(const RunConfig& cfg) {
  const Index K = std::min<Index>(cfg.depth, 14);
  const Index n = static_cast<Index>(1) << K;
  std::ostringstream csv;
  csv << "character_size,q,g_value,reference,max_deviation\n";
  json rows = json::array();
  Scalar worst = 0;
  for (Index sz = 1; sz <= std::min<Index>(K, 6); ++sz) {
    const std::uint64_t mask = (1ULL << sz) - 1;
    ArrayXXc wa(n, 1);
    for (Index w = 0; w < n; ++w)
      wa(w, 0) = std::popcount(static_cast<std::uint64_t>(w) & mask) % 2 ? -1.0 : 1.0;
    LogTimeGrid tg =
        LogTimeGrid::per_decade(1e-6 / static_cast<Scalar>(sz), 50.0 / static_cast<Scalar>(sz),
                                cfg.points_per_decade);
    const WalshGResult res = walsh_g(wa, VectorTarget(2, 1), cfg.q, tg);
    const Scalar ref = std::pow(std::tgamma(cfg.q) / std::pow(cfg.q, cfg.q), 1.0 / cfg.q);
    const Scalar dev = (res.values - ref).abs().maxCoeff();
    worst = std::max(worst, dev);
    csv << sz << ',' << format_scalar(cfg.q) << ',' << format_scalar(res.values(0)) << ','
        << format_scalar(ref) << ',' << format_scalar(dev) << '\n';
    rows.push_back({{"character_size", sz},
                    {"value", res.values(0)},
                    {"reference", ref},
                    {"max_deviation", dev}});
  }
  const Scalar tol = tol_or(cfg, "walsh", 1e-6);
  json j;
  j["depth"] = K;
  j["q"] = cfg.q;
  j["characters"] = rows;
  j["pass"] = worst <= tol;
  emit(cfg, "martingale-walsh", csv.str(), j);
  std::cout << "martingale walsh: worst deviation " << worst << "\n";
  return worst <= tol ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for square-function inequalities of semigroups"};
  app.require_subcommand(1);
  FlagSet flags;

  std::string experiment_name;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "run a named experiment");
  exp_cmd
      ->add_option("name", experiment_name,
                   "one of: subordination, pointwise-domination, lower-pprime, lower-p1q, mlbis, "
                   "fml-growth, ergodic-maximal, lacunary-equiv")
      ->required();
  Scalar lacunary_a = 2.0;
  exp_cmd->add_option("--a", lacunary_a, "lacunary ratio a > 1");
  add_config_flags(exp_cmd, flags);

  CLI::App* kernels_cmd = app.add_subcommand("kernels", "kernel checks and dumps");
  CLI::App* kcheck = kernels_cmd->add_subcommand("check", "Holder and Hormander reports");
  add_config_flags(kcheck, flags);
  CLI::App* kdump = kernels_cmd->add_subcommand("dump", "CSV dump of the dilated kernel");
  Scalar dump_t = 1.0;
  kdump->add_option("--t", dump_t, "dilation scale t > 0");
  add_config_flags(kdump, flags);
  kernels_cmd->require_subcommand(1);

  CLI::App* gfunc_cmd = app.add_subcommand("gfunc", "g-function runs");
  CLI::App* grun = gfunc_cmd->add_subcommand("run", "best-constant estimate over a family");
  bool via_kernel = false;
  grun->add_flag("--via-kernel", via_kernel, "use the convolution-kernel route");
  bool dump_field = false;
  grun->add_flag("--dump-field", dump_field, "write the first member's g-function as (x, value) CSV");
  add_config_flags(grun, flags);
  gfunc_cmd->require_subcommand(1);

  CLI::App* mart_cmd = app.add_subcommand("martingale", "martingale model runs");
  CLI::App* mcot = mart_cmd->add_subcommand("cotype", "cotype constant estimate");
  bool use_stopped = false;
  mcot->add_flag("--stopped-walk", use_stopped, "use the stopped random walk witness");
  bool dump_mart = false;
  mcot->add_flag("--dump-martingale", dump_mart, "write the witness martingale as JSON");
  add_config_flags(mcot, flags);
  CLI::App* mwalsh = mart_cmd->add_subcommand("walsh", "Walsh semigroup g-function");
  add_config_flags(mwalsh, flags);
  mart_cmd->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = flags.resolve();
    if (exp_cmd->parsed()) return run_experiment(cfg, experiment_name, lacunary_a);
    if (kcheck->parsed()) return run_kernels_check(cfg);
    if (kdump->parsed()) return run_kernels_dump(cfg, dump_t);
    if (grun->parsed()) return run_gfunc(cfg, via_kernel, dump_field);
    if (mcot->parsed()) return run_martingale_cotype(cfg, use_stopped, dump_mart);
    if (mwalsh->parsed()) return run_martingale_walsh(cfg);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
