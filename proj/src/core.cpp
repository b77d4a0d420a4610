#include "lowswitch/core.hpp"

#include <cmath>

#include "lowswitch/agents.hpp"
#include "lowswitch/criteria.hpp"

namespace lowswitch::core {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    records_.reserve(capacity);
}

void ReplayBuffer::insert(Transition t) {
    if (records_.size() < capacity_) {
        records_.push_back(std::move(t));
    } else {
        records_[head_] = std::move(t);
    }
    head_ = (head_ + 1) % capacity_;
    ++insert_count_;
}

const Transition& ReplayBuffer::recent(std::size_t i) const {
    if (i >= records_.size()) throw std::out_of_range("ReplayBuffer::recent");
    // head_ points at the slot just past the newest record.
    const std::size_t newest = (head_ + capacity_ - 1) % capacity_;
    if (records_.size() < capacity_) return records_[records_.size() - 1 - i];
    return records_[(newest + capacity_ - i) % capacity_];
}

std::vector<const Transition*> sample_recent(const ReplayBuffer& buffer, std::size_t window,
                                             std::size_t count, std::mt19937_64& rng) {
    if (count == 0) throw std::invalid_argument("sample_recent: count must be positive");
    if (window == 0) throw std::invalid_argument("sample_recent: window must be positive");
    if (buffer.size() == 0) throw std::invalid_argument("sample_recent: empty buffer");
    const std::size_t effective = std::min(window, buffer.size());
    std::uniform_int_distribution<std::size_t> pick(0, effective - 1);
    std::vector<const Transition*> batch;
    batch.reserve(count);
    for (std::size_t i = 0; i < count; ++i) batch.push_back(&buffer.recent(pick(rng)));
    return batch;
}

void RunConfig::validate() const {
    if (total_steps <= 0) throw std::invalid_argument("total_steps must be positive");
    if (total_steps <= warmup_steps)
        throw std::invalid_argument("total_steps must exceed warmup_steps");
    if (warmup_steps < 0) throw std::invalid_argument("warmup_steps must be nonnegative");
    if (update_period < 1) throw std::invalid_argument("update_period must be >= 1");
    if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must be in [0, 1)");
    if (buffer_capacity == 0) throw std::invalid_argument("buffer_capacity must be positive");
    if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    if (bonus_beta < 0.0) throw std::invalid_argument("bonus_beta must be nonnegative");
}

RunRecord run_training(const RunConfig& config, envs::Environment& env, agents::Agent& agent,
                       criteria::Criterion& criterion) {
    config.validate();
    const envs::EnvironmentSpec& spec = env.spec();

    std::mt19937_64 rng(config.seed);
    ReplayBuffer buffer(config.buffer_capacity);
    RunRecord record;
    record.step_rewards.reserve(config.total_steps);
    record.version_per_step.reserve(config.total_steps);

    std::vector<double> state = env.reset(rng);
    if (static_cast<int>(state.size()) != spec.state_dim)
        throw std::invalid_argument("environment state dimension mismatch");

    double episode_return = 0.0;
    int episode_timestep = 0;
    bool prev_episode_ended = false;
    long steps_since_switch = 0;

    for (long k = 0; k < config.total_steps; ++k) {
        const bool in_warmup = k < config.warmup_steps;
        envs::Action action =
            in_warmup ? agent.random_action(rng) : agent.act_deployed(state, rng);
        envs::StepResult result = env.step(action);

        Transition tr{state, action, result.reward, result.next_state, result.terminal, k};
        agent.on_transition(tr);
        buffer.insert(tr);

        criteria::StepInfo info{k, episode_timestep, tr, result.terminal};
        criterion.observe(info);

        record.step_rewards.push_back(result.reward);
        record.version_per_step.push_back(agent.deployed().version);
        episode_return += result.reward;
        ++episode_timestep;
        ++steps_since_switch;

        if (result.terminal) {
            record.episode_returns.push_back(episode_return);
            record.episode_end_steps.push_back(k);
            episode_return = 0.0;
            episode_timestep = 0;
            state = env.reset(rng);
            prev_episode_ended = true;
        } else {
            state = result.next_state;
            prev_episode_ended = false;
        }

        const bool update_due =
            !in_warmup && (k + 1 - config.warmup_steps) % config.update_period == 0;
        if (update_due) {
            double loss = agent.update(buffer, rng);
            if (!std::isfinite(loss))
                throw NumericalError("non-finite loss at step " + std::to_string(k), k);

            criteria::DecideContext ctx{k, prev_episode_ended, steps_since_switch,
                                        &buffer, &agent, &rng};
            if (criterion.decide(ctx)) {
                agent.deploy(k);
                record.switch_steps.push_back(k);
                criterion.notify_switch(k);
                steps_since_switch = 0;
            }
        }
    }

    record.switching_cost = static_cast<long>(record.switch_steps.size());
    record.final_version = agent.deployed().version;
    return record;
}

}  // namespace lowswitch::core
