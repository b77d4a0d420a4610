#include "lowswitch/runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lowswitch/agents.hpp"
#include "lowswitch/criteria.hpp"
#include "lowswitch/envs.hpp"

namespace lowswitch::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct Cell {
    core::CriterionConfig criterion;
    std::string label;
    std::uint64_t seed_entry;
    core::RunConfig config;
};

struct CellResult {
    bool ok = false;
    std::string error;
    core::RunRecord record;
};

ordered_json config_json(const Cell& cell) {
    ordered_json j;
    j["type"] = "config";
    j["env"] = cell.config.env_id;
    j["agent"] = cell.config.agent_id;
    j["criterion"] = cell.label;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : cell.criterion.params) params[k] = v;
    j["criterion_params"] = params;
    j["steps"] = cell.config.total_steps;
    j["warmup"] = cell.config.warmup_steps;
    j["update_period"] = cell.config.update_period;
    j["batch_size"] = cell.config.batch_size;
    j["buffer_capacity"] = cell.config.buffer_capacity;
    j["gamma"] = cell.config.gamma;
    j["bonus"] = cell.config.bonus_beta;
    j["seed"] = cell.seed_entry;
    j["run_seed"] = cell.config.seed;
    return j;
}

void write_run_file(const fs::path& path, const Cell& cell, const core::RunRecord& record) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << config_json(cell).dump() << "\n";
    for (std::size_t i = 0; i < record.episode_returns.size(); ++i) {
        ordered_json j;
        j["type"] = "episode";
        j["step"] = record.episode_end_steps[i];
        j["return"] = record.episode_returns[i];
        out << j.dump() << "\n";
    }
    for (long s : record.switch_steps) {
        ordered_json j;
        j["type"] = "switch";
        j["step"] = s;
        out << j.dump() << "\n";
    }
    ordered_json j;
    j["type"] = "final";
    j["switching_cost"] = record.switching_cost;
    j["final_version"] = record.final_version;
    j["final_reward"] = metrics::final_reward(record, cell.config.total_steps);
    out << j.dump() << "\n";
}

void write_reports(const fs::path& dir,
                   const std::map<std::string, std::vector<metrics::RunOutcome>>& outcomes,
                   bool rsi, double sigma_rsi) {
    const bool has_baseline = outcomes.count("none") > 0;
    const std::string baseline = has_baseline ? "none" : outcomes.begin()->first;
    metrics::MetricsReport report = metrics::aggregate(outcomes, baseline, sigma_rsi);
    if (!rsi || !has_baseline)
        for (auto& row : report.rows) row.rsi = 0.0;

    std::ofstream csv(dir / "summary.csv", std::ios::binary);
    csv << metrics::to_csv(report);
    std::ofstream json(dir / "metrics.json", std::ios::binary);
    json << metrics::to_json(report);
}

}  // namespace

std::uint64_t derive_run_seed(std::uint64_t base_seed, const std::string& criterion_label,
                              std::uint64_t seed_entry) {
    return splitmix64(base_seed ^ fnv1a(criterion_label) ^ (seed_entry * 0x9e3779b97f4a7c15ull));
}

core::RunRecord run_cell(const core::RunConfig& config) {
    config.validate();
    auto env = envs::make_environment(config.env_id);
    auto agent = agents::make_agent(config.agent_id, env->spec(), config);
    auto criterion = criteria::make_criterion(config.criterion, env->spec(), config.seed);
    return core::run_training(config, *env, *agent, *criterion);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    ExperimentResult result;
    fs::create_directories(spec.output_dir);

    std::vector<Cell> cells;
    for (const core::CriterionConfig& criterion : spec.criteria) {
        const std::string label = criterion_label(criterion);
        for (std::uint64_t seed : spec.seeds) {
            Cell cell;
            cell.criterion = criterion;
            cell.label = label;
            cell.seed_entry = seed;
            cell.config = spec.base;
            cell.config.criterion = criterion;
            cell.config.seed = derive_run_seed(seed, label, seed);
            cells.push_back(std::move(cell));
        }
    }

    std::vector<CellResult> results(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&cells, &results, &next] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                results[i].record = run_cell(cells[i].config);
                results[i].ok = true;
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(cells.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // All file output happens after the pool joins, in a fixed order.
    std::map<std::string, std::vector<metrics::RunOutcome>> outcomes;
    std::ostringstream long_csv;
    long_csv << "step,reward,criterion,seed\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& cell = cells[i];
        if (!results[i].ok) {
            result.failures.push_back(cell.label + " seed " + std::to_string(cell.seed_entry) +
                                      ": " + results[i].error);
            continue;
        }
        const core::RunRecord& record = results[i].record;
        const fs::path run_path =
            fs::path(spec.output_dir) /
            (cell.label + "_seed" + std::to_string(cell.seed_entry) + ".jsonl");
        write_run_file(run_path, cell, record);
        metrics::RunOutcome outcome;
        outcome.seed = cell.seed_entry;
        outcome.final_reward = metrics::final_reward(record, cell.config.total_steps);
        outcome.switching_cost = static_cast<double>(record.switching_cost);
        outcomes[cell.label].push_back(outcome);
        for (std::size_t e = 0; e < record.episode_returns.size(); ++e)
            long_csv << record.episode_end_steps[e] << ',' << format_double(record.episode_returns[e])
                     << ',' << cell.label << ',' << cell.seed_entry << '\n';
    }

    if (!outcomes.empty()) {
        std::ofstream lc(fs::path(spec.output_dir) / "long.csv", std::ios::binary);
        lc << long_csv.str();
        write_reports(spec.output_dir, outcomes, spec.rsi, spec.sigma_rsi);
    }
    result.exit_code = result.failures.empty() ? 0 : 2;
    return result;
}

int report_directory(const std::string& dir, const std::string& baseline, double sigma_rsi) {
    std::map<std::string, std::vector<metrics::RunOutcome>> outcomes;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& path : files) {
        std::ifstream in(path);
        std::string line;
        std::string label;
        std::uint64_t seed = 0;
        metrics::RunOutcome outcome;
        bool have_final = false;
        while (std::getline(in, line)) {
            const auto j = nlohmann::json::parse(line);
            const std::string type = j.at("type");
            if (type == "config") {
                label = j.at("criterion");
                seed = j.at("seed");
            } else if (type == "final") {
                outcome.final_reward = j.at("final_reward");
                outcome.switching_cost = j.at("switching_cost").get<double>();
                have_final = true;
            }
        }
        if (label.empty() || !have_final) continue;
        outcome.seed = seed;
        outcomes[label].push_back(outcome);
    }
    if (outcomes.empty()) return 1;
    for (auto& [label, runs] : outcomes)
        std::sort(runs.begin(), runs.end(),
                  [](const metrics::RunOutcome& a, const metrics::RunOutcome& b) {
                      return a.seed < b.seed;
                  });
    const bool has_baseline = outcomes.count(baseline) > 0;
    write_reports(dir, outcomes, has_baseline, sigma_rsi);
    return 0;
}

}  // namespace lowswitch::cli
