#include "lps/config.hpp"

#include "lps/io.hpp"

#include <algorithm>
#include <sstream>

namespace lps {

namespace {

const std::vector<std::string> kValidKeys = {
    "d",      "L",         "N",      "t-min",  "t-max", "points-per-decade",
    "p",      "q",         "r",      "m",      "kernel", "semigroup",
    "family", "samples",   "depth",  "seed",   "out",    "jobs",
    "tol.*  (tolerance overrides)"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Scalar parse_number(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  Scalar v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not a number: '" + value + "'");
  }
  if (used != value.size())
    throw std::invalid_argument(key + ": not a number: '" + value + "'");
  return v;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "d") {
    const Scalar v = parse_number(key, value);
    if (v != 1 && v != 2) throw std::invalid_argument("d must be 1 or 2");
    cfg.d = static_cast<int>(v);
  } else if (key == "L") {
    const Scalar v = parse_number(key, value);
    if (!(v > 0)) throw std::invalid_argument("L must be positive");
    cfg.half_width = v;
  } else if (key == "N") {
    const Scalar v = parse_number(key, value);
    const Index n = static_cast<Index>(v);
    if (static_cast<Scalar>(n) != v || !is_pow2(n) || n < 16)
      throw std::invalid_argument("N must be a power of two >= 16");
    cfg.n = n;
  } else if (key == "t-min") {
    const Scalar v = parse_number(key, value);
    if (!(v > 0)) throw std::invalid_argument("t-min must be positive");
    cfg.t_min = v;
  } else if (key == "t-max") {
    cfg.t_max = parse_number(key, value);
  } else if (key == "points-per-decade") {
    const Scalar v = parse_number(key, value);
    if (!(v >= 1)) throw std::invalid_argument("points-per-decade must be >= 1");
    cfg.points_per_decade = static_cast<Index>(v);
  } else if (key == "p") {
    std::vector<Scalar> ps;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const Scalar v = parse_number(key, trim(item));
      if (!(v > 1)) throw std::invalid_argument("p must be > 1");
      ps.push_back(v);
    }
    if (ps.empty()) throw std::invalid_argument("p list must not be empty");
    cfg.p_list = ps;
  } else if (key == "q") {
    const Scalar v = parse_number(key, value);
    if (!(v >= 1)) throw std::invalid_argument("q must be >= 1");
    cfg.q = v;
  } else if (key == "r") {
    const Scalar v = parse_number(key, value);
    if (!(v >= 1)) throw std::invalid_argument("r must be >= 1");
    cfg.target_r = v;
  } else if (key == "m") {
    const Scalar v = parse_number(key, value);
    if (!(v >= 1)) throw std::invalid_argument("m must be >= 1");
    cfg.target_m = static_cast<Index>(v);
  } else if (key == "kernel") {
    if (value != "dt-poisson" && value != "phi")
      throw std::invalid_argument("kernel must be dt-poisson or phi");
    cfg.kernel = value;
  } else if (key == "semigroup") {
    if (value != "heat" && value != "poisson" && value != "translation-poisson")
      throw std::invalid_argument("semigroup must be heat, poisson or translation-poisson");
    cfg.semigroup = value;
  } else if (key == "family") {
    cfg.family = value;
  } else if (key == "samples") {
    const Scalar v = parse_number(key, value);
    if (!(v >= 1)) throw std::invalid_argument("samples must be >= 1");
    cfg.samples = static_cast<Index>(v);
  } else if (key == "depth") {
    const Scalar v = parse_number(key, value);
    if (!(v >= 1 && v <= 20)) throw std::invalid_argument("depth must be in [1, 20]");
    cfg.depth = static_cast<Index>(v);
  } else if (key == "seed") {
    try {
      cfg.seed = std::stoull(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("seed must be a 64-bit integer");
    }
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "jobs") {
    const Scalar v = parse_number(key, value);
    if (!(v >= 1)) throw std::invalid_argument("jobs must be >= 1");
    cfg.jobs = static_cast<int>(v);
  } else if (key.rfind("tol.", 0) == 0) {
    cfg.tolerances[key.substr(4)] = parse_number(key, value);
  } else {
    std::ostringstream msg;
    msg << "unknown key '" << key << "'; valid keys:";
    for (const auto& k : kValidKeys) msg << ' ' << k;
    throw std::invalid_argument(msg.str());
  }
}

void validate(const RunConfig& cfg) {
  if (!(cfg.t_min < cfg.t_max))
    throw std::invalid_argument("t-min must be smaller than t-max");
}

}  // namespace

RunConfig parse_config(const std::string& file_content,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg;
  std::stringstream ss(file_content);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config line " << lineno << ": expected 'key = value'";
      throw std::invalid_argument(msg.str());
    }
    apply(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (const auto& [k, v] : overrides) apply(cfg, k, v);
  validate(cfg);
  return cfg;
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  os << "d = " << d << '\n';
  os << "L = " << format_scalar(half_width) << '\n';
  os << "N = " << n << '\n';
  os << "t-min = " << format_scalar(t_min) << '\n';
  os << "t-max = " << format_scalar(t_max) << '\n';
  os << "points-per-decade = " << points_per_decade << '\n';
  os << "p = ";
  for (std::size_t i = 0; i < p_list.size(); ++i)
    os << (i ? "," : "") << format_scalar(p_list[i]);
  os << '\n';
  os << "q = " << format_scalar(q) << '\n';
  os << "r = " << format_scalar(target_r) << '\n';
  os << "m = " << target_m << '\n';
  os << "kernel = " << kernel << '\n';
  os << "semigroup = " << semigroup << '\n';
  os << "family = " << family << '\n';
  os << "samples = " << samples << '\n';
  os << "depth = " << depth << '\n';
  os << "seed = " << seed << '\n';
  for (const auto& [k, v] : tolerances) os << "tol." << k << " = " << format_scalar(v) << '\n';
  os << "out = " << out_dir << '\n';
  os << "jobs = " << jobs << '\n';
  return os.str();
}

}  // namespace lps
