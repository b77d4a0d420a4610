#pragma once
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lowswitch/core.hpp"

namespace lowswitch::metrics {

struct RsiInput {
    double baseline_reward = 0.0;  // R hat, from the unconstrained baseline
    double baseline_cost = 1.0;    // C hat, >= 1
    double reward = 0.0;           // R_J
    double cost = 1.0;             // C_J, >= 1
    double sigma = 0.2;            // reward-tolerance threshold
};

// indicator[R_J > (1 - sign(R)sigma) R] * ln(max(C/C_J, 1)); the non-log
// variant returns the clamped ratio itself.
double rsi(const RsiInput& input, bool log_variant = true);

long switching_cost(const core::RunRecord& record);

// Mean episode return over episodes ending in the last 10% of training steps
// (falls back to the last episode when none land there).
double final_reward(const core::RunRecord& record, long total_steps);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

// Welch's unequal-variance test with Welch-Satterthwaite degrees of freedom.
// Throws std::invalid_argument on samples of size < 2 or when both variances
// are zero.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

// Continued-fraction evaluation, accurate to ~1e-8.
double regularized_incomplete_beta(double a, double b, double x);
double student_t_two_sided_p(double t, double df);

struct RunOutcome {
    std::uint64_t seed = 0;
    double final_reward = 0.0;
    double switching_cost = 0.0;
};

struct CriterionSummary {
    std::string criterion;
    std::size_t seed_count = 0;
    double reward_mean = 0.0, reward_std = 0.0;
    double cost_mean = 0.0, cost_std = 0.0;
    double rsi = 0.0;
};

struct PairTest {
    std::string a, b;
    double t = 0.0, df = 0.0, p = 1.0;
    bool degenerate = false;  // both variances zero; no p-value
};

struct MetricsReport {
    double sigma_rsi = 0.2;
    std::string baseline;
    std::vector<CriterionSummary> rows;   // sorted by criterion label
    std::vector<PairTest> cost_tests;
};

// RSI is computed against the baseline's mean reward and mean cost; pairwise
// Welch tests run on per-seed switching costs. Throws std::invalid_argument
// when the baseline label is missing.
MetricsReport aggregate(const std::map<std::string, std::vector<RunOutcome>>& by_criterion,
                        const std::string& baseline_id, double sigma_rsi = 0.2,
                        bool log_variant = true);

// Flat summary table: criterion, seed_count, reward_mean, reward_std,
// cost_mean, cost_std, rsi.
std::string to_csv(const MetricsReport& report);
std::string to_json(const MetricsReport& report);

}  // namespace lowswitch::metrics
