#pragma once
#include <optional>
#include <string>
#include <vector>

#include "lowswitch/core.hpp"

namespace lowswitch::cli {

struct ExperimentSpec {
    core::RunConfig base;  // criterion field unused; filled per cell
    std::vector<core::CriterionConfig> criteria;
    std::vector<std::uint64_t> seeds;
    std::string output_dir = "results";
    int jobs = 1;
    bool rsi = true;
    double sigma_rsi = 0.2;
};

struct ParseResult {
    std::optional<ExperimentSpec> spec;  // set only when errors is empty
    std::vector<std::string> errors;     // all problems, not just the first
};

// Flat key-value text with [section] headers; see README for the schema.
ParseResult parse_config(const std::string& text);

// Compact criterion string: none | fix:n=1000 | policy:sigma=0.5 |
// feature:sigma=0.97,force=10000 | visitation | info:lambda=1.0
core::CriterionConfig parse_criterion(const std::string& token);

// Stable filename-safe label, e.g. "fix_n1000".
std::string criterion_label(const core::CriterionConfig& config);

}  // namespace lowswitch::cli
