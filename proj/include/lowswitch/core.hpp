#pragma once
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lowswitch/envs.hpp"

namespace lowswitch::agents { class Agent; }
namespace lowswitch::criteria { class Criterion; }

namespace lowswitch::core {

// Thrown when a loss or parameter goes non-finite; names the step.
struct NumericalError : std::runtime_error {
    long step;
    NumericalError(const std::string& what, long step_index)
        : std::runtime_error(what), step(step_index) {}
};

struct Transition {
    std::vector<double> state;
    envs::Action action;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
    long step_index = 0;
};

// FIFO ring buffer; oldest records evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void insert(Transition t);
    std::size_t size() const { return records_.size(); }
    std::size_t capacity() const { return capacity_; }
    long insert_count() const { return insert_count_; }

    // i = 0 is the newest record.
    const Transition& recent(std::size_t i) const;
    const Transition& oldest() const { return recent(records_.size() - 1); }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next write position
    long insert_count_ = 0;
    std::vector<Transition> records_;
};

// Uniform sample with replacement from the min(window, size) newest records.
std::vector<const Transition*> sample_recent(const ReplayBuffer& buffer,
                                             std::size_t window, std::size_t count,
                                             std::mt19937_64& rng);

struct PolicySnapshot {
    std::vector<double> parameters;
    int version = 0;
    long created_at_step = 0;
};

struct CriterionConfig {
    std::string id;                        // none, fix, policy, feature, visitation, info
    std::map<std::string, double> params;  // n, sigma, force, lambda
};

struct RunConfig {
    std::string env_id;
    std::string agent_id;
    CriterionConfig criterion;
    long total_steps = 50000;
    std::uint64_t seed = 0;
    double gamma = 0.99;
    std::size_t buffer_capacity = 100000;
    std::size_t batch_size = 32;
    long update_period = 1;
    long warmup_steps = 1000;
    double bonus_beta = 0.01;

    void validate() const;  // throws std::invalid_argument
};

struct RunRecord {
    std::vector<double> step_rewards;      // raw environment rewards
    std::vector<double> episode_returns;
    std::vector<long> episode_end_steps;   // global step at which each episode ended
    std::vector<long> switch_steps;        // strictly increasing, all < K
    std::vector<int> version_per_step;     // deployed version used at each step
    long switching_cost = 0;
    int final_version = 0;
};

// Algorithm: act with the deployed snapshot, store the transition, train the
// online parameters every update_period steps after warmup, then consult the
// criterion and redeploy when it fires. Warmup steps use random actions and
// never count as switches.
RunRecord run_training(const RunConfig& config, envs::Environment& env,
                       agents::Agent& agent, criteria::Criterion& criterion);

}  // namespace lowswitch::core
