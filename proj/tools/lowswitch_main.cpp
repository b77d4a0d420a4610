#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lowswitch/agents.hpp"
#include "lowswitch/config.hpp"
#include "lowswitch/criteria.hpp"
#include "lowswitch/envs.hpp"
#include "lowswitch/metrics.hpp"
#include "lowswitch/runner.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& seeds_override,
            const std::string& out_override, int jobs_override,
            const std::vector<std::string>& criterion_overrides) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "cannot read config file: " << config_path << "\n";
        return 1;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    if (!seeds_override.empty()) text += "\n[run]\nseeds = " + seeds_override + "\n";
    if (!criterion_overrides.empty()) {
        std::string list;
        for (std::size_t i = 0; i < criterion_overrides.size(); ++i) {
            if (i) list += ", ";
            list += criterion_overrides[i];
        }
        text += "\n[criteria]\nlist = " + list + "\n";
    }

    auto parsed = lowswitch::cli::parse_config(text);
    if (!parsed.spec) {
        for (const std::string& e : parsed.errors) std::cerr << "config error: " << e << "\n";
        return 1;
    }
    lowswitch::cli::ExperimentSpec spec = *parsed.spec;
    if (!out_override.empty()) {
        spec.output_dir = out_override;
    } else if (const char* root = std::getenv("LOWSWITCH_OUT");
               root && *root && std::filesystem::path(spec.output_dir).is_relative()) {
        spec.output_dir = (std::filesystem::path(root) / spec.output_dir).string();
    }
    if (jobs_override > 0) spec.jobs = jobs_override;

    const auto result = lowswitch::cli::run_experiment(spec);
    for (const std::string& f : result.failures) std::cerr << "run failed: " << f << "\n";
    std::cout << "results written to " << spec.output_dir << "\n";
    return result.exit_code;
}

int cmd_theorem1(int k, double alpha) {
    try {
        const auto result = lowswitch::criteria::theorem1_check(k, alpha);
        std::cout << "similarity " << result.similarity << "\n";
        std::cout << "prediction_error " << result.prediction_error << "\n";
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

bool check(bool ok, const std::string& name) {
    std::cout << (ok ? "[pass] " : "[FAIL] ") << name << "\n";
    return ok;
}

int cmd_selftest() {
    using namespace lowswitch;
    bool ok = true;

    metrics::RsiInput rsi_in{10.0, 1000.0, 10.0, 1.0, 0.2};
    ok &= check(std::abs(metrics::rsi(rsi_in) - std::log(1000.0)) < 1e-9, "rsi log ratio");

    const auto thm = criteria::theorem1_check(4, 0.5);
    ok &= check(thm.similarity == 0.5 && thm.prediction_error == 0.5, "theorem construction");

    const auto tt = metrics::student_t_two_sided_p(2.0, 10.0);
    ok &= check(std::abs(tt - 0.07339) < 1e-3, "t distribution");

    hashing::RandomProjection proj(16, 4, 7);
    hashing::HashedCounter counter(proj);
    const std::vector<double> state = {1.0, 2.0, 3.0, 4.0};
    int fires = 0;
    for (int i = 0; i < 1000; ++i)
        if (criteria::is_power_of_two(counter.observe(state))) ++fires;
    ok &= check(fires == 10, "visitation doubling");

    core::RunConfig config;
    config.env_id = "gridworld5";
    config.agent_id = "dqn_lite";
    config.criterion = {"fix", {{"n", 100}}};
    config.total_steps = 500;
    config.warmup_steps = 100;
    config.seed = 1;
    const auto record = cli::run_cell(config);
    ok &= check(record.switching_cost == 4 && record.step_rewards.size() == 500,
                "training loop");

    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-switching-cost RL experiment runner"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "execute an experiment config");
    std::string config_path, seeds, out;
    int jobs = 0;
    std::vector<std::string> criteria;
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--seeds", seeds, "comma-separated seed list override");
    run->add_option("--out", out, "output directory override");
    run->add_option("--jobs", jobs, "parallel run cells");
    run->add_option("--criterion", criteria, "criterion override (repeatable)");

    auto* report = app.add_subcommand("report", "re-aggregate a result directory");
    std::string report_dir;
    report->add_option("dir", report_dir, "result directory")->required();

    auto* theorem = app.add_subcommand("theorem1", "representation recovery construction");
    int k = 4;
    double alpha = 0.5;
    theorem->add_option("--k", k, "feature dimension (even)")->required();
    theorem->add_option("--alpha", alpha, "flipped fraction, alpha*k integer")->required();

    auto* selftest = app.add_subcommand("selftest", "quick internal checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, seeds, out, jobs, criteria);
        if (report->parsed()) return lowswitch::cli::report_directory(report_dir);
        if (theorem->parsed()) return cmd_theorem1(k, alpha);
        if (selftest->parsed()) return cmd_selftest();
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 0;
}
