#include "lowswitch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace lowswitch::metrics {

double rsi(const RsiInput& input, bool log_variant) {
    if (input.baseline_cost < 1.0 || input.cost < 1.0)
        throw std::invalid_argument("rsi: switching costs must be >= 1");
    if (input.sigma < 0.0 || input.sigma >= 1.0)
        throw std::invalid_argument("rsi: sigma must be in [0, 1)");
    const double sign = input.baseline_reward > 0.0   ? 1.0
                        : input.baseline_reward < 0.0 ? -1.0
                                                      : 0.0;
    const double threshold = (1.0 - sign * input.sigma) * input.baseline_reward;
    if (!(input.reward > threshold)) return 0.0;
    const double ratio = std::max(input.baseline_cost / input.cost, 1.0);
    return log_variant ? std::log(ratio) : ratio;
}

long switching_cost(const core::RunRecord& record) {
    return static_cast<long>(record.switch_steps.size());
}

double final_reward(const core::RunRecord& record, long total_steps) {
    if (record.episode_returns.empty()) return 0.0;
    const long cutoff = total_steps - total_steps / 10;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < record.episode_returns.size(); ++i) {
        if (record.episode_end_steps[i] >= cutoff) {
            sum += record.episode_returns[i];
            ++count;
        }
    }
    if (count == 0) return record.episode_returns.back();
    return sum / static_cast<double>(count);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("incomplete beta: a, b must be > 0");
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete beta: x must be in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    // Continued fraction (modified Lentz); use the symmetry
    // I_x(a,b) = 1 - I_{1-x}(b,a) for fast convergence.
    if (x > (a + 1.0) / (a + b + 2.0))
        return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front) / a;

    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 400; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-12) break;
    }
    return front * h;
}

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw std::invalid_argument("student_t_two_sided_p: df must be positive");
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // unbiased
    std::size_t n = 0;
};

Moments moments(std::span<const double> sample) {
    Moments m;
    m.n = sample.size();
    for (double v : sample) m.mean += v;
    m.mean /= static_cast<double>(m.n);
    for (double v : sample) m.var += (v - m.mean) * (v - m.mean);
    m.var /= static_cast<double>(m.n - 1);
    return m;
}

double stddev_of(const std::vector<double>& values, double mean) {
    if (values.size() < 2) return 0.0;
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch_t_test: each sample needs >= 2 values");
    const Moments ma = moments(a), mb = moments(b);
    if (ma.var == 0.0 && mb.var == 0.0)
        throw std::invalid_argument("welch_t_test: both samples are degenerate");
    const double sa = ma.var / static_cast<double>(ma.n);
    const double sb = mb.var / static_cast<double>(mb.n);
    TTestResult result;
    result.t = (ma.mean - mb.mean) / std::sqrt(sa + sb);
    result.df = (sa + sb) * (sa + sb) /
                (sa * sa / static_cast<double>(ma.n - 1) + sb * sb / static_cast<double>(mb.n - 1));
    result.p = student_t_two_sided_p(result.t, result.df);
    return result;
}

MetricsReport aggregate(const std::map<std::string, std::vector<RunOutcome>>& by_criterion,
                        const std::string& baseline_id, double sigma_rsi, bool log_variant) {
    auto base_it = by_criterion.find(baseline_id);
    if (base_it == by_criterion.end() || base_it->second.empty())
        throw std::invalid_argument("aggregate: baseline '" + baseline_id + "' is missing");

    MetricsReport report;
    report.sigma_rsi = sigma_rsi;
    report.baseline = baseline_id;

    auto mean_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };

    std::map<std::string, std::pair<double, double>> summary_means;  // reward, cost
    for (const auto& [label, outcomes] : by_criterion) {
        std::vector<double> rewards, costs;
        for (const RunOutcome& o : outcomes) {
            rewards.push_back(o.final_reward);
            costs.push_back(o.switching_cost);
        }
        CriterionSummary row;
        row.criterion = label;
        row.seed_count = outcomes.size();
        row.reward_mean = mean_of(rewards);
        row.reward_std = stddev_of(rewards, row.reward_mean);
        row.cost_mean = mean_of(costs);
        row.cost_std = stddev_of(costs, row.cost_mean);
        summary_means[label] = {row.reward_mean, row.cost_mean};
        report.rows.push_back(row);
    }

    const auto [base_reward, base_cost] = summary_means.at(baseline_id);
    for (CriterionSummary& row : report.rows) {
        RsiInput input;
        input.baseline_reward = base_reward;
        input.baseline_cost = std::max(base_cost, 1.0);
        input.reward = row.reward_mean;
        input.cost = std::max(row.cost_mean, 1.0);
        input.sigma = sigma_rsi;
        row.rsi = row.criterion == baseline_id ? 0.0 : rsi(input, log_variant);
    }

    // Pairwise Welch tests on per-seed switching costs, labels in sorted order.
    std::vector<std::string> labels;
    for (const auto& [label, _] : by_criterion) labels.push_back(label);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            std::vector<double> ca, cb;
            for (const RunOutcome& o : by_criterion.at(labels[i])) ca.push_back(o.switching_cost);
            for (const RunOutcome& o : by_criterion.at(labels[j])) cb.push_back(o.switching_cost);
            PairTest pt;
            pt.a = labels[i];
            pt.b = labels[j];
            if (ca.size() < 2 || cb.size() < 2) continue;
            try {
                const TTestResult r = welch_t_test(ca, cb);
                pt.t = r.t;
                pt.df = r.df;
                pt.p = r.p;
            } catch (const std::invalid_argument&) {
                pt.degenerate = true;
            }
            report.cost_tests.push_back(pt);
        }
    }
    return report;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::string to_csv(const MetricsReport& report) {
    std::ostringstream out;
    out << "criterion,seed_count,reward_mean,reward_std,cost_mean,cost_std,rsi\n";
    for (const CriterionSummary& row : report.rows) {
        out << row.criterion << ',' << row.seed_count << ',' << format_double(row.reward_mean)
            << ',' << format_double(row.reward_std) << ',' << format_double(row.cost_mean) << ','
            << format_double(row.cost_std) << ',' << format_double(row.rsi) << '\n';
    }
    return out.str();
}

std::string to_json(const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["sigma_rsi"] = report.sigma_rsi;
    j["baseline"] = report.baseline;
    j["criteria"] = nlohmann::ordered_json::array();
    for (const CriterionSummary& row : report.rows) {
        nlohmann::ordered_json r;
        r["criterion"] = row.criterion;
        r["seed_count"] = row.seed_count;
        r["reward_mean"] = row.reward_mean;
        r["reward_std"] = row.reward_std;
        r["cost_mean"] = row.cost_mean;
        r["cost_std"] = row.cost_std;
        r["rsi"] = row.rsi;
        j["criteria"].push_back(r);
    }
    j["cost_t_tests"] = nlohmann::ordered_json::array();
    for (const PairTest& pt : report.cost_tests) {
        nlohmann::ordered_json r;
        r["a"] = pt.a;
        r["b"] = pt.b;
        if (pt.degenerate) {
            r["p"] = nullptr;
            r["degenerate"] = true;
        } else {
            r["t"] = pt.t;
            r["df"] = pt.df;
            r["p"] = pt.p;
        }
        j["cost_t_tests"].push_back(r);
    }
    return j.dump(2) + "\n";
}

}  // namespace lowswitch::metrics
