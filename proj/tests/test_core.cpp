#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <set>

#include "doctest.h"
#include "lowswitch/agents.hpp"
#include "lowswitch/core.hpp"
#include "lowswitch/criteria.hpp"
#include "lowswitch/envs.hpp"

using namespace lowswitch;
using core::ReplayBuffer;
using core::Transition;

namespace {

Transition marked(long index) {
    Transition t;
    t.state = {static_cast<double>(index)};
    t.step_index = index;
    return t;
}

core::RunConfig small_run(const std::string& criterion_id,
                          std::map<std::string, double> params = {}) {
    core::RunConfig config;
    config.env_id = "chain10";
    config.agent_id = "dqn_lite";
    config.criterion = {criterion_id, std::move(params)};
    config.total_steps = 300;
    config.warmup_steps = 50;
    config.update_period = 5;
    config.batch_size = 8;
    config.seed = 12345;
    return config;
}

core::RunRecord execute(const core::RunConfig& config) {
    auto env = envs::make_environment(config.env_id);
    auto agent = agents::make_agent(config.agent_id, env->spec(), config);
    auto criterion = criteria::make_criterion(config.criterion, env->spec(), config.seed);
    return core::run_training(config, *env, *agent, *criterion);
}

}  // namespace

TEST_CASE("replay buffer is FIFO with recent(0) as the newest record") {
    ReplayBuffer buffer(3);
    CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
    for (long i = 0; i < 5; ++i) buffer.insert(marked(i));
    CHECK(buffer.size() == 3);
    CHECK(buffer.insert_count() == 5);
    CHECK(buffer.recent(0).step_index == 4);
    CHECK(buffer.recent(1).step_index == 3);
    CHECK(buffer.recent(2).step_index == 2);
    CHECK(buffer.oldest().step_index == 2);
    CHECK_THROWS_AS(buffer.recent(3), std::out_of_range);
}

TEST_CASE("sample_recent draws only from the newest window") {
    ReplayBuffer buffer(100);
    for (long i = 0; i < 100; ++i) buffer.insert(marked(i));
    std::mt19937_64 rng(1);
    const auto batch = core::sample_recent(buffer, 10, 500, rng);
    CHECK(batch.size() == 500);
    for (const Transition* t : batch) CHECK(t->step_index >= 90);

    // With enough draws every record in the window appears.
    std::set<long> seen;
    for (const Transition* t : batch) seen.insert(t->step_index);
    CHECK(seen.size() == 10);
}

TEST_CASE("sample_recent window larger than the buffer uses everything") {
    ReplayBuffer buffer(8);
    for (long i = 0; i < 4; ++i) buffer.insert(marked(i));
    std::mt19937_64 rng(2);
    const auto batch = core::sample_recent(buffer, 1000, 200, rng);
    std::set<long> seen;
    for (const Transition* t : batch) seen.insert(t->step_index);
    CHECK(seen == std::set<long>{0, 1, 2, 3});
}

TEST_CASE("sample_recent argument validation") {
    ReplayBuffer buffer(4);
    std::mt19937_64 rng(3);
    CHECK_THROWS_AS(core::sample_recent(buffer, 4, 1, rng), std::invalid_argument);
    buffer.insert(marked(0));
    CHECK_THROWS_AS(core::sample_recent(buffer, 0, 1, rng), std::invalid_argument);
    CHECK_THROWS_AS(core::sample_recent(buffer, 4, 0, rng), std::invalid_argument);
}

TEST_CASE("sample_recent is deterministic under a fixed rng") {
    ReplayBuffer buffer(50);
    for (long i = 0; i < 50; ++i) buffer.insert(marked(i));
    std::mt19937_64 rng_a(7), rng_b(7);
    const auto a = core::sample_recent(buffer, 20, 64, rng_a);
    const auto b = core::sample_recent(buffer, 20, 64, rng_b);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("run config validation") {
    core::RunConfig config = small_run("none");
    CHECK_NOTHROW(config.validate());
    config.total_steps = 10;
    config.warmup_steps = 10;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = small_run("none");
    config.gamma = 1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = small_run("none");
    config.update_period = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("a criterion that never fires yields zero switches") {
    core::RunConfig config = small_run("never");
    auto env = envs::make_environment(config.env_id);
    auto agent = agents::make_agent(config.agent_id, env->spec(), config);
    criteria::NeverCriterion criterion;
    const auto record = core::run_training(config, *env, *agent, criterion);
    CHECK(record.switching_cost == 0);
    CHECK(record.switch_steps.empty());
    CHECK(record.final_version == 0);
    for (int v : record.version_per_step) CHECK(v == 0);
}

TEST_CASE("the unconstrained baseline switches at every update event") {
    core::RunConfig config = small_run("none");
    const auto record = execute(config);
    // Update events at k >= warmup with (k + 1 - warmup) % period == 0.
    const long expected = (config.total_steps - config.warmup_steps) / config.update_period;
    CHECK(record.switching_cost == expected);
    CHECK(record.final_version == expected);
    CHECK(static_cast<long>(record.step_rewards.size()) == config.total_steps);
    CHECK(static_cast<long>(record.version_per_step.size()) == config.total_steps);
}

TEST_CASE("fixed-interval switching counts multiples inside the training range") {
    core::RunConfig config = small_run("fix", {{"n", 100}});
    config.update_period = 1;
    const auto record = execute(config);
    // Updates run at k = 50..299; k % 100 == 0 holds at 100 and 200.
    CHECK(record.switch_steps == std::vector<long>{100, 200});
    CHECK(record.switching_cost == 2);
}

TEST_CASE("deployed version recorded per step is piecewise constant") {
    core::RunConfig config = small_run("fix", {{"n", 100}});
    config.update_period = 1;
    const auto record = execute(config);
    for (long k = 0; k < config.total_steps; ++k) {
        int expected = 0;
        for (long s : record.switch_steps)
            if (s < k) ++expected;  // the switch at k applies from k + 1 on
        CHECK(record.version_per_step[k] == expected);
    }
}

TEST_CASE("warmup steps never trigger a deployment") {
    core::RunConfig config = small_run("none");
    const auto record = execute(config);
    for (long s : record.switch_steps) CHECK(s >= config.warmup_steps);
}

TEST_CASE("identical configs reproduce the run record exactly") {
    const core::RunConfig config = small_run("fix", {{"n", 25}});
    const auto a = execute(config);
    const auto b = execute(config);
    CHECK(a.step_rewards == b.step_rewards);
    CHECK(a.episode_returns == b.episode_returns);
    CHECK(a.episode_end_steps == b.episode_end_steps);
    CHECK(a.switch_steps == b.switch_steps);
    CHECK(a.version_per_step == b.version_per_step);
    CHECK(a.switching_cost == b.switching_cost);
}

TEST_CASE("episode bookkeeping is consistent") {
    const auto record = execute(small_run("none"));
    REQUIRE(record.episode_returns.size() == record.episode_end_steps.size());
    CHECK_FALSE(record.episode_returns.empty());
    for (std::size_t i = 1; i < record.episode_end_steps.size(); ++i)
        CHECK(record.episode_end_steps[i] > record.episode_end_steps[i - 1]);
    // Returns of completed episodes sum to the step rewards up to the last end.
    double from_episodes = 0.0;
    for (double r : record.episode_returns) from_episodes += r;
    double from_steps = 0.0;
    for (long k = 0; k <= record.episode_end_steps.back(); ++k)
        from_steps += record.step_rewards[k];
    CHECK(from_episodes == doctest::Approx(from_steps).epsilon(1e-12));
}
