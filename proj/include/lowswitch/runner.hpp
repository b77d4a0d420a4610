#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "lowswitch/config.hpp"
#include "lowswitch/core.hpp"
#include "lowswitch/metrics.hpp"

namespace lowswitch::cli {

// Independent per-cell seed: splitmix64 over the base seed mixed with a hash
// of the criterion label and the seed list entry, so adding criteria never
// perturbs existing runs.
std::uint64_t derive_run_seed(std::uint64_t base_seed, const std::string& criterion_label,
                              std::uint64_t seed_entry);

// Executes one (criterion, seed) cell in isolation.
core::RunRecord run_cell(const core::RunConfig& config);

struct ExperimentResult {
    int exit_code = 0;  // 0 ok, 2 when >= 1 cell failed
    std::vector<std::string> failures;
};

// Runs all cells (optionally in a thread pool), writes one JSONL file per
// run plus summary.csv, metrics.json and long.csv. Byte-identical outputs
// for identical specs regardless of the parallelism degree.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Re-aggregates an output directory from its JSONL run files.
int report_directory(const std::string& dir, const std::string& baseline = "none",
                     double sigma_rsi = 0.2);

}  // namespace lowswitch::cli
