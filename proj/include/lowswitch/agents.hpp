#pragma once
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lowswitch/core.hpp"
#include "lowswitch/hashing.hpp"
#include "lowswitch/nn.hpp"

namespace lowswitch::agents {

// Off-policy learner with a frozen deployed snapshot and a trained online
// policy. The run loop only ever acts through the deployed side.
class Agent {
public:
    virtual ~Agent() = default;

    virtual const std::string& id() const = 0;
    virtual bool discrete() const = 0;

    virtual envs::Action act_deployed(std::span<const double> state,
                                      std::mt19937_64& rng) = 0;
    virtual envs::Action random_action(std::mt19937_64& rng) const = 0;

    // Called once per stored transition (exploration counters live here).
    virtual void on_transition(const core::Transition& t) { (void)t; }

    // One training event; returns the (last) loss value.
    virtual double update(const core::ReplayBuffer& buffer, std::mt19937_64& rng) = 0;

    // Copy online parameters into the deployed snapshot; bumps the version.
    virtual void deploy(long step) = 0;
    virtual const core::PolicySnapshot& deployed() const = 0;
    virtual core::PolicySnapshot online_snapshot(long step) const = 0;

    // Criterion support. Discrete agents implement the greedy pair,
    // continuous agents the Gaussian pair; both implement features.
    virtual int greedy_deployed(std::span<const double> state) const;
    virtual int greedy_online(std::span<const double> state) const;
    virtual void gaussian_deployed(std::span<const double> state,
                                   std::vector<double>& mean,
                                   std::vector<double>& log_std) const;
    virtual void gaussian_online(std::span<const double> state,
                                 std::vector<double>& mean,
                                 std::vector<double>& log_std) const;
    virtual std::vector<double> feature_deployed(std::span<const double> state) const = 0;
    virtual std::vector<double> feature_online(std::span<const double> state) const = 0;
};

// r+(x) = beta / sqrt(n(phi(x))). The state must have been observed already.
double exploration_bonus(const hashing::HashedCounter& counter,
                         std::span<const double> state, double beta);

// Greedy action under a Q-network; ties break toward the lowest index.
int dqn_select_action(const nn::Mlp& q_net, std::span<const double> state);

double dqn_td_target(double reward, double bonus, std::span<const double> next_state,
                     bool terminal, const nn::Mlp& target_net, double gamma);

struct DqnOptions {
    std::vector<int> hidden = {64, 64};
    double lr = 1e-3;
    double adam_eps = 1.5e-4;
    long target_sync_period = 200;  // updates between hard target copies
    int counter_proj_dim = 16;
};

class DqnAgent : public Agent {
public:
    DqnAgent(const envs::EnvironmentSpec& spec, const core::RunConfig& config,
             DqnOptions options = {});

    const std::string& id() const override;
    bool discrete() const override { return true; }
    envs::Action act_deployed(std::span<const double> state, std::mt19937_64& rng) override;
    envs::Action random_action(std::mt19937_64& rng) const override;
    void on_transition(const core::Transition& t) override;
    double update(const core::ReplayBuffer& buffer, std::mt19937_64& rng) override;
    void deploy(long step) override;
    const core::PolicySnapshot& deployed() const override { return deployed_; }
    core::PolicySnapshot online_snapshot(long step) const override;
    int greedy_deployed(std::span<const double> state) const override;
    int greedy_online(std::span<const double> state) const override;
    std::vector<double> feature_deployed(std::span<const double> state) const override;
    std::vector<double> feature_online(std::span<const double> state) const override;

    const nn::Mlp& online_net() const { return online_; }
    const nn::Mlp& target_net() const { return target_; }
    long update_count() const { return update_count_; }

private:
    int action_count_;
    double gamma_;
    double beta_;
    std::size_t batch_size_;
    DqnOptions opts_;
    nn::Mlp online_;
    nn::Mlp target_;
    nn::Mlp deployed_net_;
    core::PolicySnapshot deployed_;
    nn::AdamState adam_;
    hashing::HashedCounter counter_;
    long update_count_ = 0;
};

struct SacOptions {
    std::vector<int> hidden = {128, 128};
    double lr = 1e-3;
    double alpha = 0.2;          // entropy coefficient
    double tau = 0.005;          // target smoothing
    double log_std_min = -5.0;
    double log_std_max = 2.0;
    long updates_per_call = 50;  // 50 iterations per update event
};

class SacAgent : public Agent {
public:
    SacAgent(const envs::EnvironmentSpec& spec, const core::RunConfig& config,
             SacOptions options = {});

    const std::string& id() const override;
    bool discrete() const override { return false; }
    envs::Action act_deployed(std::span<const double> state, std::mt19937_64& rng) override;
    envs::Action random_action(std::mt19937_64& rng) const override;
    double update(const core::ReplayBuffer& buffer, std::mt19937_64& rng) override;
    void deploy(long step) override;
    const core::PolicySnapshot& deployed() const override { return deployed_; }
    core::PolicySnapshot online_snapshot(long step) const override;
    void gaussian_deployed(std::span<const double> state, std::vector<double>& mean,
                           std::vector<double>& log_std) const override;
    void gaussian_online(std::span<const double> state, std::vector<double>& mean,
                         std::vector<double>& log_std) const override;
    std::vector<double> feature_deployed(std::span<const double> state) const override;
    std::vector<double> feature_online(std::span<const double> state) const override;

    const nn::Mlp& q_net() const { return q_; }
    const nn::Mlp& actor_net() const { return actor_; }
    double last_actor_loss() const { return last_actor_loss_; }

    // Pre-squash Gaussian head of an actor network at a state.
    void actor_gaussian(const nn::Mlp& actor, std::span<const double> state,
                        std::vector<double>& mean, std::vector<double>& log_std) const;
    // Squash a pre-squash sample into the action bounds.
    std::vector<double> squash(std::span<const double> pre) const;

    double q_target_value(double reward, std::span<const double> next_state,
                          bool terminal, std::mt19937_64& rng) const;

private:
    friend struct SacTestAccess;
    int action_dim_;
    double gamma_;
    std::size_t batch_size_;
    SacOptions opts_;
    std::vector<double> action_center_, action_scale_;
    nn::Mlp q_;
    nn::Mlp actor_;
    std::vector<double> q_target_params_;
    nn::Mlp deployed_q_;
    nn::Mlp deployed_actor_;
    core::PolicySnapshot deployed_;  // actor ++ q parameters
    nn::AdamState q_adam_, actor_adam_;
    double last_actor_loss_ = 0.0;

    std::vector<double> concat_params() const;
    std::vector<double> feature_of(const nn::Mlp& q, const nn::Mlp& actor,
                                   std::span<const double> state) const;
};

// Ids: dqn_lite, sac_lite. Hidden widths follow the environment
// (64 for gridworld/chain, 128 for the physics tasks).
std::unique_ptr<Agent> make_agent(const std::string& id, const envs::EnvironmentSpec& spec,
                                  const core::RunConfig& config);
const std::vector<std::string>& agent_ids();

}  // namespace lowswitch::agents
