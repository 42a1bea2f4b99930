// Output emission: CSV tables (17 significant digits, '.' decimal,
// newline-terminated rows) and JSON summaries.
#pragma once

#include "lps/experiments.hpp"
#include "lps/martingale.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace lps {

std::string format_scalar(Scalar v);

void write_text_file(const std::string& path, const std::string& content);

// experiment,p,q,r,m,value,reference,ratio rows
std::string report_csv(const ExperimentReport& rep);
nlohmann::ordered_json report_json(const ExperimentReport& rep);

nlohmann::ordered_json estimate_json(const ConstantEstimate& est);
std::string estimate_csv(const ConstantEstimate& est);

// plot-data JSON: {"x": [...], "y": [...]} from report rows
nlohmann::ordered_json plot_json(const ExperimentReport& rep);

// pointwise scalar samples as (x..., value) rows
std::string field_csv(const GridSpec& grid, const ArrayX& values);

nlohmann::ordered_json martingale_json(const BooleanMartingale& m);
std::string decomposition_csv(const AtomicDecomposition& dec);

}  // namespace lps
