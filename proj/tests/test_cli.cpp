#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lowswitch/config.hpp"
#include "lowswitch/runner.hpp"

using namespace lowswitch;
namespace fs = std::filesystem;

namespace {

const char* kValidConfig = R"(
[run]
env = chain10
agent = dqn_lite
steps = 300
warmup = 50
update_period = 5
batch_size = 8
seeds = 0, 1

[criteria]
list = none, fix:n=50

[output]
dir = results
jobs = 1
sigma_rsi = 0.25
)";

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("criterion strings parse") {
    const auto fix = cli::parse_criterion("fix:n=1000");
    CHECK(fix.id == "fix");
    CHECK(fix.params.at("n") == 1000.0);
    CHECK(cli::criterion_label(fix) == "fix_n1000");

    const auto feature = cli::parse_criterion("feature:sigma=0.97,force=10000");
    CHECK(feature.params.at("sigma") == 0.97);
    CHECK(feature.params.at("force") == 10000.0);
    CHECK(cli::criterion_label(feature) == "feature_force10000_sigma0.97");

    CHECK(cli::parse_criterion("none").params.empty());
    CHECK(cli::criterion_label(cli::parse_criterion("visitation")) == "visitation");
    CHECK(cli::parse_criterion("info:lambda=1.0").params.at("lambda") == 1.0);
    CHECK(cli::parse_criterion("policy:sigma=0.5").params.at("sigma") == 0.5);

    CHECK_THROWS_AS(cli::parse_criterion("bogus"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_criterion("fix:n"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_criterion("fix:n=abc"), std::invalid_argument);
}

TEST_CASE("a valid config parses into a full spec") {
    const auto result = cli::parse_config(kValidConfig);
    REQUIRE(result.errors.empty());
    REQUIRE(result.spec.has_value());
    const cli::ExperimentSpec& spec = *result.spec;
    CHECK(spec.base.env_id == "chain10");
    CHECK(spec.base.agent_id == "dqn_lite");
    CHECK(spec.base.total_steps == 300);
    CHECK(spec.base.warmup_steps == 50);
    CHECK(spec.base.update_period == 5);
    CHECK(spec.base.batch_size == 8);
    CHECK(spec.seeds == std::vector<std::uint64_t>{0, 1});
    REQUIRE(spec.criteria.size() == 2);
    CHECK(spec.criteria[0].id == "none");
    CHECK(spec.criteria[1].id == "fix");
    CHECK(spec.sigma_rsi == 0.25);
    CHECK(spec.rsi);
}

TEST_CASE("all config problems are reported, not just the first") {
    const char* broken = R"(
[run]
env = marsrover
agent = dqn_lite
steps = many
seeds = 0, 0

[criteria]
list = warp:x=1

[output]
jobs = 0
)";
    const auto result = cli::parse_config(broken);
    CHECK_FALSE(result.spec.has_value());
    CHECK(result.errors.size() >= 5);
    auto mentions = [&result](const std::string& needle) {
        for (const std::string& e : result.errors)
            if (e.find(needle) != std::string::npos) return true;
        return false;
    };
    CHECK(mentions("marsrover"));
    CHECK(mentions("steps"));
    CHECK(mentions("duplicate"));
    CHECK(mentions("warp"));
    CHECK(mentions("jobs"));
}

TEST_CASE("error listings name the valid identifiers") {
    const auto result = cli::parse_config("[run]\nenv = x\nagent = y\nseeds = 1\n"
                                          "[criteria]\nlist = none\n");
    CHECK_FALSE(result.spec.has_value());
    bool env_listed = false, agent_listed = false;
    for (const std::string& e : result.errors) {
        if (e.find("gridworld5") != std::string::npos) env_listed = true;
        if (e.find("sac_lite") != std::string::npos) agent_listed = true;
    }
    CHECK(env_listed);
    CHECK(agent_listed);
}

TEST_CASE("rsi reporting requires the unconstrained baseline") {
    std::string text = kValidConfig;
    const auto pos = text.find("none, ");
    text.erase(pos, 6);
    const auto result = cli::parse_config(text);
    CHECK_FALSE(result.spec.has_value());
    bool found = false;
    for (const std::string& e : result.errors)
        if (e.find("baseline") != std::string::npos) found = true;
    CHECK(found);

    // Explicitly disabling RSI lifts the requirement.
    text += "\n[output]\nrsi = false\n";
    CHECK(cli::parse_config(text).spec.has_value());
}

TEST_CASE("run seeds derive deterministically per cell") {
    const auto a = cli::derive_run_seed(0, "none", 0);
    const auto b = cli::derive_run_seed(0, "none", 0);
    CHECK(a == b);
    CHECK(cli::derive_run_seed(0, "none", 1) != a);
    CHECK(cli::derive_run_seed(0, "fix_n1000", 0) != a);
    CHECK(cli::derive_run_seed(1, "none", 0) != a);
}

TEST_CASE("experiments write the full result set and rerun byte-identically") {
    const auto parsed = cli::parse_config(kValidConfig);
    REQUIRE(parsed.spec.has_value());
    cli::ExperimentSpec spec = *parsed.spec;
    TempDir dir_a("lowswitch_cli_a"), dir_b("lowswitch_cli_b");
    spec.output_dir = dir_a.path.string();
    const auto first = cli::run_experiment(spec);
    CHECK(first.exit_code == 0);
    CHECK(first.failures.empty());

    for (const char* name : {"none_seed0.jsonl", "none_seed1.jsonl", "fix_n50_seed0.jsonl",
                             "fix_n50_seed1.jsonl", "summary.csv", "metrics.json",
                             "long.csv"}) {
        CHECK(fs::exists(dir_a.path / name));
    }

    spec.output_dir = dir_b.path.string();
    spec.jobs = 2;  // a different parallelism degree must not change the bytes
    const auto second = cli::run_experiment(spec);
    CHECK(second.exit_code == 0);
    for (const char* name : {"summary.csv", "metrics.json", "long.csv", "none_seed0.jsonl",
                             "fix_n50_seed1.jsonl"}) {
        CHECK(read_file(dir_a.path / name) == read_file(dir_b.path / name));
    }

    const std::string summary = read_file(dir_a.path / "summary.csv");
    CHECK(summary.rfind("criterion,", 0) == 0);
    CHECK(summary.find("fix_n50,2,") != std::string::npos);
    CHECK(summary.find("none,2,") != std::string::npos);
}

TEST_CASE("report rebuilds the summary from the run files") {
    const auto parsed = cli::parse_config(kValidConfig);
    REQUIRE(parsed.spec.has_value());
    cli::ExperimentSpec spec = *parsed.spec;
    TempDir dir("lowswitch_cli_report");
    spec.output_dir = dir.path.string();
    spec.sigma_rsi = 0.2;
    REQUIRE(cli::run_experiment(spec).exit_code == 0);

    const std::string before = read_file(dir.path / "summary.csv");
    fs::remove(dir.path / "summary.csv");
    fs::remove(dir.path / "metrics.json");
    CHECK(cli::report_directory(dir.path.string()) == 0);
    CHECK(read_file(dir.path / "summary.csv") == before);

    TempDir empty("lowswitch_cli_empty");
    fs::create_directories(empty.path);
    CHECK(cli::report_directory(empty.path.string()) == 1);
}
