#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "lowswitch/envs.hpp"

using namespace lowswitch::envs;

namespace {

int argmax_index(const std::vector<double>& one_hot) {
    int best = 0;
    for (std::size_t i = 1; i < one_hot.size(); ++i)
        if (one_hot[i] > one_hot[best]) best = static_cast<int>(i);
    return best;
}

}  // namespace

TEST_CASE("environment catalog") {
    CHECK(environment_ids() ==
          std::vector<std::string>{"gridworld5", "chain10", "cartpole_lite", "pendulum_lite"});
    CHECK_THROWS_AS(make_environment("nope"), std::invalid_argument);
    CHECK(max_episode_return("gridworld5") == 1.0);
    CHECK(max_episode_return("chain10") == 1.0);
    CHECK(max_episode_return("cartpole_lite") == 200.0);
    CHECK(max_episode_return("pendulum_lite") == 0.0);
}

TEST_CASE("gridworld reaches the goal along a fixed path") {
    auto env = make_environment("gridworld5");
    std::mt19937_64 rng(0);
    auto state = env->reset(rng);
    CHECK(argmax_index(state) == 0);  // start (0,0)

    // 4 down + 4 right: exactly 8 steps to (4,4).
    double total = 0.0;
    StepResult r;
    for (int i = 0; i < 4; ++i) r = env->step({1, {}}), total += r.reward;
    for (int i = 0; i < 4; ++i) r = env->step({3, {}}), total += r.reward;
    CHECK(r.terminal);
    CHECK(total == 1.0);
    CHECK(argmax_index(r.next_state) == 24);
    CHECK_THROWS_AS(env->step({0, {}}), std::logic_error);
}

TEST_CASE("gridworld clamps at the border and truncates at the horizon") {
    auto env = make_environment("gridworld5");
    std::mt19937_64 rng(0);
    auto state = env->reset(rng);
    StepResult r = env->step({0, {}});  // up from (0,0): stays put
    CHECK(argmax_index(r.next_state) == 0);
    CHECK(r.reward == 0.0);
    for (int i = 1; i < 100; ++i) {
        CHECK_FALSE(r.terminal);
        r = env->step({0, {}});
    }
    CHECK(r.terminal);  // horizon 100
    CHECK(r.reward == 0.0);
}

TEST_CASE("chain rewards") {
    auto env = make_environment("chain10");
    std::mt19937_64 rng(0);
    env->reset(rng);
    StepResult r = env->step({0, {}});  // left at state 0 pays the distractor
    CHECK(r.reward == 0.01);
    CHECK_FALSE(r.terminal);
    for (int i = 0; i < 9; ++i) r = env->step({1, {}});
    CHECK(r.reward == 1.0);
    CHECK(r.terminal);
    CHECK(argmax_index(r.next_state) == 9);
}

TEST_CASE("chain truncates at 50 steps") {
    auto env = make_environment("chain10");
    std::mt19937_64 rng(0);
    env->reset(rng);
    StepResult r;
    for (int i = 0; i < 50; ++i) {
        r = env->step({0, {}});
    }
    CHECK(r.terminal);
}

TEST_CASE("cartpole matches an independent Euler integration") {
    // Re-derive the dynamics here so the environment is checked against a
    // second implementation, not itself.
    auto oracle = [](std::array<double, 4> s, int action) {
        const double g = 9.8, mc = 1.0, mp = 0.1, l = 0.5, f = 10.0, dt = 0.02;
        const double force = action == 1 ? f : -f;
        const double costh = std::cos(s[2]), sinth = std::sin(s[2]);
        const double temp = (force + mp * l * s[3] * s[3] * sinth) / (mc + mp);
        const double thetaacc =
            (g * sinth - costh * temp) / (l * (4.0 / 3.0 - mp * costh * costh / (mc + mp)));
        const double xacc = temp - mp * l * thetaacc * costh / (mc + mp);
        return std::array<double, 4>{s[0] + dt * s[1], s[1] + dt * xacc, s[2] + dt * s[3],
                                     s[3] + dt * thetaacc};
    };

    auto env = make_environment("cartpole_lite");
    std::mt19937_64 rng(42);
    auto obs = env->reset(rng);
    REQUIRE(obs.size() == 4);
    std::array<double, 4> state = {obs[0], obs[1], obs[2], obs[3]};
    std::mt19937_64 act_rng(7);
    std::uniform_int_distribution<int> pick(0, 1);
    for (int i = 0; i < 50; ++i) {
        const int a = pick(act_rng);
        const StepResult r = env->step({a, {}});
        state = oracle(state, a);
        for (int j = 0; j < 4; ++j)
            CHECK(r.next_state[j] == doctest::Approx(state[j]).epsilon(1e-12));
        if (r.terminal) break;
    }
}

TEST_CASE("cartpole pays 1 per surviving step and 0 on the fall") {
    auto env = make_environment("cartpole_lite");
    std::mt19937_64 rng(3);
    env->reset(rng);
    // Push right forever: the pole falls well before the horizon.
    StepResult r;
    int steps = 0;
    double total = 0.0;
    do {
        r = env->step({1, {}});
        total += r.reward;
        ++steps;
    } while (!r.terminal && steps < 200);
    CHECK(r.terminal);
    CHECK(steps < 200);
    CHECK(r.reward == 0.0);
    CHECK(total == doctest::Approx(static_cast<double>(steps - 1)));
}

TEST_CASE("pendulum cost and horizon") {
    auto env = make_environment("pendulum_lite");
    std::mt19937_64 rng(5);
    auto obs = env->reset(rng);
    REQUIRE(obs.size() == 3);
    const double theta = std::atan2(obs[1], obs[0]);
    const double thetadot = obs[2];
    const StepResult r = env->step({0, {0.5}});
    const double expected_cost =
        theta * theta + 0.1 * thetadot * thetadot + 0.001 * 0.5 * 0.5;
    CHECK(r.reward == doctest::Approx(-expected_cost).epsilon(1e-10));
    CHECK(r.reward <= 0.0);

    // Always runs the full 200-step horizon.
    StepResult last = r;
    int steps = 1;
    while (!last.terminal) {
        last = env->step({0, {2.5}});  // torque clamps to 2
        ++steps;
    }
    CHECK(steps == 200);

    // Speed stays within the limit.
    std::mt19937_64 rng2(6);
    env->reset(rng2);
    for (int i = 0; i < 200; ++i) {
        const StepResult s = env->step({0, {2.0}});
        CHECK(std::abs(s.next_state[2]) <= 8.0);
        if (s.terminal) break;
    }
}

TEST_CASE("pendulum rejects malformed actions") {
    auto env = make_environment("pendulum_lite");
    std::mt19937_64 rng(1);
    env->reset(rng);
    CHECK_THROWS_AS(env->step({0, {}}), std::invalid_argument);
    CHECK_THROWS_AS(env->step({0, {1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("discrete environments reject out-of-range actions") {
    for (const std::string id : {"gridworld5", "chain10", "cartpole_lite"}) {
        auto env = make_environment(id);
        std::mt19937_64 rng(1);
        env->reset(rng);
        CHECK_THROWS_AS(env->step({-1, {}}), std::invalid_argument);
        CHECK_THROWS_AS(env->step({env->spec().actions.count, {}}), std::invalid_argument);
    }
}

TEST_CASE("resets with the same rng state reproduce the trajectory") {
    for (const std::string id : environment_ids()) {
        auto env_a = make_environment(id);
        auto env_b = make_environment(id);
        std::mt19937_64 rng_a(11), rng_b(11);
        auto sa = env_a->reset(rng_a);
        auto sb = env_b->reset(rng_b);
        CHECK(sa == sb);
        const bool discrete = env_a->spec().actions.discrete;
        for (int i = 0; i < 20; ++i) {
            const Action a = discrete ? Action{i % env_a->spec().actions.count, {}}
                                      : Action{0, {std::sin(i * 0.7)}};
            const StepResult ra = env_a->step(a);
            const StepResult rb = env_b->step(a);
            CHECK(ra.next_state == rb.next_state);
            CHECK(ra.reward == rb.reward);
            CHECK(ra.terminal == rb.terminal);
            if (ra.terminal) break;
        }
    }
}

TEST_CASE("rewards stay inside the declared range") {
    for (const std::string id : environment_ids()) {
        auto env = make_environment(id);
        const EnvironmentSpec& spec = env->spec();
        std::mt19937_64 rng(17);
        env->reset(rng);
        std::uniform_int_distribution<int> pick(0, std::max(1, spec.actions.count) - 1);
        std::uniform_real_distribution<double> torque(-2.0, 2.0);
        for (int i = 0; i < 500; ++i) {
            const Action a = spec.actions.discrete ? Action{pick(rng), {}}
                                                   : Action{0, {torque(rng)}};
            const StepResult r = env->step(a);
            CHECK(r.reward >= spec.reward_min - 1e-12);
            CHECK(r.reward <= spec.reward_max + 1e-12);
            CHECK(static_cast<int>(r.next_state.size()) == spec.state_dim);
            if (r.terminal) env->reset(rng);
        }
    }
}
