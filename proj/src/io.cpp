#include "lps/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace lps {

using json = nlohmann::ordered_json;

std::string format_scalar(Scalar v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string report_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "experiment,label,p,q,r,m,value,reference,ratio\n";
  for (const auto& row : rep.rows) {
    os << rep.name << ',' << row.label << ',' << format_scalar(row.p) << ','
       << format_scalar(row.q) << ',' << format_scalar(row.r) << ',' << row.m << ','
       << format_scalar(row.value) << ',' << format_scalar(row.reference) << ','
       << format_scalar(row.ratio) << '\n';
  }
  return os.str();
}

json report_json(const ExperimentReport& rep) {
  json j;
  j["experiment"] = rep.name;
  j["pass"] = rep.pass;
  j["seed"] = rep.seed;
  j["wall_seconds"] = rep.wall_seconds;
  json params = json::object();
  for (const auto& [k, v] : rep.parameters) params[k] = v;
  j["parameters"] = params;
  json fits = json::array();
  for (const auto& nf : rep.fits) {
    json f;
    f["name"] = nf.name;
    f["slope"] = nf.fit.slope;
    f["intercept"] = nf.fit.intercept;
    f["slope_stderr"] = nf.fit.slope_stderr;
    f["slope_ci"] = {nf.fit.slope_lo, nf.fit.slope_hi};
    fits.push_back(f);
  }
  j["fits"] = fits;
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json cc;
    cc["name"] = c.name;
    cc["pass"] = c.pass;
    cc["value"] = c.value;
    checks.push_back(cc);
  }
  j["checks"] = checks;
  return j;
}

json plot_json(const ExperimentReport& rep) {
  json j;
  std::vector<Scalar> x, y;
  for (const auto& row : rep.rows) {
    x.push_back(row.p);
    y.push_back(row.value);
  }
  j["x"] = x;
  j["y"] = y;
  return j;
}

std::string field_csv(const GridSpec& grid, const ArrayX& values) {
  if (values.size() != grid.size()) throw std::invalid_argument("field_csv: size mismatch");
  std::ostringstream os;
  os << (grid.d == 1 ? "x,value\n" : "x,y,value\n");
  for (Index i = 0; i < grid.size(); ++i) {
    os << format_scalar(grid.x1(i)) << ',';
    if (grid.d == 2) os << format_scalar(grid.x2(i)) << ',';
    os << format_scalar(values(i)) << '\n';
  }
  return os.str();
}

json estimate_json(const ConstantEstimate& est) {
  json j;
  j["p"] = est.p;
  j["q"] = est.q;
  j["r"] = est.r;
  j["m"] = est.m;
  j["family"] = est.family;
  j["estimate"] = est.estimate;
  j["argmax_family_member"] = est.argmax_label;
  j["samples_used"] = est.samples_used;
  j["skipped"] = est.skipped;
  j["seed"] = est.seed;
  json grid;
  grid["d"] = est.d;
  grid["half_width"] = est.half_width;
  grid["n"] = est.n;
  grid["t_min"] = est.t_min;
  grid["t_max"] = est.t_max;
  grid["t_count"] = est.t_count;
  j["grid"] = grid;
  return j;
}

std::string estimate_csv(const ConstantEstimate& est) {
  std::ostringstream os;
  os << "family,p,q,r,m,estimate,argmax,samples,skipped,seed\n";
  os << est.family << ',' << format_scalar(est.p) << ',' << format_scalar(est.q) << ','
     << format_scalar(est.r) << ',' << est.m << ',' << format_scalar(est.estimate) << ','
     << est.argmax_label << ',' << est.samples_used << ',' << est.skipped << ',' << est.seed
     << '\n';
  return os.str();
}

json martingale_json(const BooleanMartingale& m) {
  json j;
  j["depth"] = m.depth;
  j["target_r"] = m.target.r;
  j["target_m"] = m.target.m;
  json tables = json::array();
  for (const auto& tab : m.diffs) {
    json rows = json::array();
    for (Index r = 0; r < tab.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < tab.cols(); ++c)
        row.push_back({tab(r, c).real(), tab(r, c).imag()});
      rows.push_back(row);
    }
    tables.push_back(rows);
  }
  j["difference_tables"] = tables;
  return j;
}

std::string decomposition_csv(const AtomicDecomposition& dec) {
  std::ostringstream os;
  os << "level,j,lambda\n";
  for (const auto& e : dec.entries)
    os << e.cube.level << ',' << e.cube.j0 << ',' << format_scalar(e.lambda) << '\n';
  return os.str();
}

}  // namespace lps
