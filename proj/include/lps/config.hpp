// Run configuration: a line-oriented "key = value" file, with flags taking
// precedence; the effective configuration is echoed next to the outputs so a
// run is fully captured by its echo.
#pragma once

#include "lps/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace lps {

struct RunConfig {
  int d = 1;
  Scalar half_width = 256;
  Index n = 1 << 14;
  Scalar t_min = std::ldexp(1.0, -12);
  Scalar t_max = std::ldexp(1.0, 12);
  Index points_per_decade = 48;
  std::vector<Scalar> p_list = {2.0};
  Scalar q = 2.0;
  Scalar target_r = 2.0;
  Index target_m = 1;
  std::string kernel = "dt-poisson";     // dt-poisson | phi
  std::string semigroup = "poisson";     // heat | poisson | translation-poisson
  std::string family = "poisson-scales";
  Index samples = 16;
  Index depth = 12;  // martingale depth
  std::uint64_t seed = 0;
  std::map<std::string, Scalar> tolerances;
  std::string out_dir = ".";
  int jobs = 1;

  std::string echo() const;
};

// Parses file content first (may be empty), then applies flag overrides in
// order. Unknown keys raise an error naming the valid keys; invalid values
// raise an error naming the constraint.
RunConfig parse_config(const std::string& file_content,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

}  // namespace lps
