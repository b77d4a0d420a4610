#include "lowswitch/agents.hpp"

#include <algorithm>
#include <cmath>

namespace lowswitch::agents {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log sqrt(2 pi)

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed + salt * 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Seed salts: keep the network init, the exploration hash and any criterion
// hash on distinct streams of the same run seed.
constexpr std::uint64_t kSaltNetInit = 1;
constexpr std::uint64_t kSaltCounter = 2;
constexpr std::uint64_t kSaltActor = 3;

}  // namespace

int Agent::greedy_deployed(std::span<const double>) const {
    throw std::logic_error("greedy actions are only defined for discrete agents");
}
int Agent::greedy_online(std::span<const double>) const {
    throw std::logic_error("greedy actions are only defined for discrete agents");
}
void Agent::gaussian_deployed(std::span<const double>, std::vector<double>&,
                              std::vector<double>&) const {
    throw std::logic_error("Gaussian heads are only defined for continuous agents");
}
void Agent::gaussian_online(std::span<const double>, std::vector<double>&,
                            std::vector<double>&) const {
    throw std::logic_error("Gaussian heads are only defined for continuous agents");
}

double exploration_bonus(const hashing::HashedCounter& counter, std::span<const double> state,
                         double beta) {
    if (beta == 0.0) return 0.0;
    const std::uint64_t n = counter.count(state);
    if (n == 0) throw std::logic_error("exploration_bonus: state has not been counted");
    return beta / std::sqrt(static_cast<double>(n));
}

int dqn_select_action(const nn::Mlp& q_net, std::span<const double> state) {
    const auto cache = q_net.forward(state);
    const std::vector<double>& q = cache.output();
    int best = 0;
    for (int a = 1; a < static_cast<int>(q.size()); ++a)
        if (q[a] > q[best]) best = a;
    return best;
}

double dqn_td_target(double reward, double bonus, std::span<const double> next_state,
                     bool terminal, const nn::Mlp& target_net, double gamma) {
    if (terminal) return reward + bonus;
    const auto cache = target_net.forward(next_state);
    const std::vector<double>& q = cache.output();
    return reward + bonus + gamma * *std::max_element(q.begin(), q.end());
}

// --- DQN-lite --------------------------------------------------------------

static std::vector<int> q_arch(const envs::EnvironmentSpec& spec,
                               const std::vector<int>& hidden) {
    std::vector<int> arch;
    arch.push_back(spec.state_dim);
    arch.insert(arch.end(), hidden.begin(), hidden.end());
    arch.push_back(spec.actions.count);
    return arch;
}

DqnAgent::DqnAgent(const envs::EnvironmentSpec& spec, const core::RunConfig& config,
                   DqnOptions options)
    : action_count_(spec.actions.count),
      gamma_(config.gamma),
      beta_(config.bonus_beta),
      batch_size_(config.batch_size),
      opts_(std::move(options)),
      online_(nn::Mlp::random_init(q_arch(spec, opts_.hidden),
                                   mix_seed(config.seed, kSaltNetInit))),
      target_(online_),
      deployed_net_(online_),
      counter_(hashing::RandomProjection(opts_.counter_proj_dim, spec.state_dim,
                                         mix_seed(config.seed, kSaltCounter))) {
    if (!spec.actions.discrete)
        throw std::invalid_argument("dqn_lite requires a discrete action space");
    deployed_ = {online_.params(), 0, 0};
    adam_ = nn::AdamState(online_.param_count(), opts_.lr, opts_.adam_eps);
}

const std::string& DqnAgent::id() const {
    static const std::string name = "dqn_lite";
    return name;
}

envs::Action DqnAgent::act_deployed(std::span<const double> state, std::mt19937_64&) {
    return {dqn_select_action(deployed_net_, state), {}};
}

envs::Action DqnAgent::random_action(std::mt19937_64& rng) const {
    std::uniform_int_distribution<int> pick(0, action_count_ - 1);
    return {pick(rng), {}};
}

void DqnAgent::on_transition(const core::Transition& t) {
    counter_.observe(t.next_state);
}

double DqnAgent::update(const core::ReplayBuffer& buffer, std::mt19937_64& rng) {
    const auto batch = core::sample_recent(buffer, buffer.size(), batch_size_, rng);
    const double inv = 1.0 / static_cast<double>(batch.size());

    std::vector<double> grads(online_.param_count(), 0.0);
    std::vector<double> dout(action_count_);
    double loss = 0.0;
    for (const core::Transition* tr : batch) {
        const double bonus =
            beta_ > 0.0 ? exploration_bonus(counter_, tr->next_state, beta_) : 0.0;
        const double target =
            dqn_td_target(tr->reward, bonus, tr->next_state, tr->terminal, target_, gamma_);
        const auto cache = online_.forward(tr->state);
        const double diff = cache.output()[tr->action.index] - target;
        loss += diff * diff * inv;
        std::fill(dout.begin(), dout.end(), 0.0);
        dout[tr->action.index] = 2.0 * diff * inv;
        const auto g = online_.backward(cache, dout);
        for (std::size_t i = 0; i < grads.size(); ++i) grads[i] += g.params[i];
    }
    nn::adam_step(online_.params(), grads, adam_);

    ++update_count_;
    if (update_count_ % opts_.target_sync_period == 0) target_.params() = online_.params();
    return loss;
}

void DqnAgent::deploy(long step) {
    deployed_net_.params() = online_.params();
    deployed_.parameters = online_.params();
    deployed_.version += 1;
    deployed_.created_at_step = step;
}

core::PolicySnapshot DqnAgent::online_snapshot(long step) const {
    return {online_.params(), deployed_.version + 1, step};
}

int DqnAgent::greedy_deployed(std::span<const double> state) const {
    return dqn_select_action(deployed_net_, state);
}

int DqnAgent::greedy_online(std::span<const double> state) const {
    return dqn_select_action(online_, state);
}

std::vector<double> DqnAgent::feature_deployed(std::span<const double> state) const {
    return deployed_net_.feature(deployed_net_.forward(state));
}

std::vector<double> DqnAgent::feature_online(std::span<const double> state) const {
    return online_.feature(online_.forward(state));
}

// --- SAC-lite --------------------------------------------------------------

SacAgent::SacAgent(const envs::EnvironmentSpec& spec, const core::RunConfig& config,
                   SacOptions options)
    : action_dim_(spec.actions.dim),
      gamma_(config.gamma),
      batch_size_(config.batch_size),
      opts_(std::move(options)) {
    if (spec.actions.discrete)
        throw std::invalid_argument("sac_lite requires a continuous action space");
    action_center_.resize(action_dim_);
    action_scale_.resize(action_dim_);
    for (int i = 0; i < action_dim_; ++i) {
        action_center_[i] = 0.5 * (spec.actions.high[i] + spec.actions.low[i]);
        action_scale_[i] = 0.5 * (spec.actions.high[i] - spec.actions.low[i]);
    }
    std::vector<int> qa;
    qa.push_back(spec.state_dim + action_dim_);
    qa.insert(qa.end(), opts_.hidden.begin(), opts_.hidden.end());
    qa.push_back(1);
    q_ = nn::Mlp::random_init(qa, mix_seed(config.seed, kSaltNetInit));

    std::vector<int> pa;
    pa.push_back(spec.state_dim);
    pa.insert(pa.end(), opts_.hidden.begin(), opts_.hidden.end());
    pa.push_back(2 * action_dim_);
    actor_ = nn::Mlp::random_init(pa, mix_seed(config.seed, kSaltActor));

    q_target_params_ = q_.params();
    deployed_q_ = q_;
    deployed_actor_ = actor_;
    deployed_ = {concat_params(), 0, 0};
    q_adam_ = nn::AdamState(q_.param_count(), opts_.lr);
    actor_adam_ = nn::AdamState(actor_.param_count(), opts_.lr);
}

const std::string& SacAgent::id() const {
    static const std::string name = "sac_lite";
    return name;
}

std::vector<double> SacAgent::concat_params() const {
    std::vector<double> p = actor_.params();
    p.insert(p.end(), q_.params().begin(), q_.params().end());
    return p;
}

void SacAgent::actor_gaussian(const nn::Mlp& actor, std::span<const double> state,
                              std::vector<double>& mean, std::vector<double>& log_std) const {
    const auto cache = actor.forward(state);
    const std::vector<double>& out = cache.output();
    mean.assign(out.begin(), out.begin() + action_dim_);
    log_std.resize(action_dim_);
    for (int i = 0; i < action_dim_; ++i)
        log_std[i] = std::clamp(out[action_dim_ + i], opts_.log_std_min, opts_.log_std_max);
}

std::vector<double> SacAgent::squash(std::span<const double> pre) const {
    std::vector<double> a(action_dim_);
    for (int i = 0; i < action_dim_; ++i)
        a[i] = action_center_[i] + action_scale_[i] * std::tanh(pre[i]);
    return a;
}

envs::Action SacAgent::act_deployed(std::span<const double> state, std::mt19937_64& rng) {
    std::vector<double> mean, log_std;
    actor_gaussian(deployed_actor_, state, mean, log_std);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> pre(action_dim_);
    for (int i = 0; i < action_dim_; ++i) pre[i] = mean[i] + std::exp(log_std[i]) * gauss(rng);
    return {0, squash(pre)};
}

envs::Action SacAgent::random_action(std::mt19937_64& rng) const {
    std::vector<double> a(action_dim_);
    for (int i = 0; i < action_dim_; ++i) {
        std::uniform_real_distribution<double> dist(action_center_[i] - action_scale_[i],
                                                    action_center_[i] + action_scale_[i]);
        a[i] = dist(rng);
    }
    return {0, a};
}

double SacAgent::q_target_value(double reward, std::span<const double> next_state,
                                bool terminal, std::mt19937_64& rng) const {
    if (terminal) return reward;
    std::vector<double> mean, log_std;
    actor_gaussian(actor_, next_state, mean, log_std);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double log_prob = 0.0;
    std::vector<double> input(next_state.begin(), next_state.end());
    for (int i = 0; i < action_dim_; ++i) {
        const double eps = gauss(rng);
        const double u = mean[i] + std::exp(log_std[i]) * eps;
        const double t = std::tanh(u);
        log_prob += -log_std[i] - 0.5 * eps * eps - kLogSqrt2Pi -
                    std::log(action_scale_[i] * (1.0 - t * t) + 1e-12);
        input.push_back(action_center_[i] + action_scale_[i] * t);
    }
    nn::Mlp target_q = q_;  // reuse architecture, swap in target parameters
    target_q.params() = q_target_params_;
    const double qv = target_q.forward(input).output()[0];
    return reward + gamma_ * (qv - opts_.alpha * log_prob);
}

double SacAgent::update(const core::ReplayBuffer& buffer, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    nn::Mlp target_q = q_;
    double q_loss = 0.0;

    for (long it = 0; it < opts_.updates_per_call; ++it) {
        const auto batch = core::sample_recent(buffer, buffer.size(), batch_size_, rng);
        const double inv = 1.0 / static_cast<double>(batch.size());
        target_q.params() = q_target_params_;

        // Q step: squared error against the entropy-regularized target.
        std::vector<double> q_grads(q_.param_count(), 0.0);
        q_loss = 0.0;
        for (const core::Transition* tr : batch) {
            double y = tr->reward;
            if (!tr->terminal) {
                std::vector<double> mean, log_std;
                actor_gaussian(actor_, tr->next_state, mean, log_std);
                std::vector<double> input(tr->next_state.begin(), tr->next_state.end());
                double log_prob = 0.0;
                for (int i = 0; i < action_dim_; ++i) {
                    const double eps = gauss(rng);
                    const double u = mean[i] + std::exp(log_std[i]) * eps;
                    const double t = std::tanh(u);
                    log_prob += -log_std[i] - 0.5 * eps * eps - kLogSqrt2Pi -
                                std::log(action_scale_[i] * (1.0 - t * t) + 1e-12);
                    input.push_back(action_center_[i] + action_scale_[i] * t);
                }
                y = tr->reward +
                    gamma_ * (target_q.forward(input).output()[0] - opts_.alpha * log_prob);
            }
            std::vector<double> sa(tr->state.begin(), tr->state.end());
            sa.insert(sa.end(), tr->action.values.begin(), tr->action.values.end());
            const auto cache = q_.forward(sa);
            const double diff = cache.output()[0] - y;
            q_loss += diff * diff * inv;
            const double dout[1] = {2.0 * diff * inv};
            const auto g = q_.backward(cache, dout);
            for (std::size_t i = 0; i < q_grads.size(); ++i) q_grads[i] += g.params[i];
        }
        nn::adam_step(q_.params(), q_grads, q_adam_);

        // Actor step: reparameterized gradient of alpha log pi - Q.
        std::vector<double> actor_grads(actor_.param_count(), 0.0);
        double actor_loss = 0.0;
        for (const core::Transition* tr : batch) {
            const auto actor_cache = actor_.forward(tr->state);
            const std::vector<double>& head = actor_cache.output();
            std::vector<double> dhead(2 * action_dim_, 0.0);
            std::vector<double> sa(tr->state.begin(), tr->state.end());
            std::vector<double> eps(action_dim_), t(action_dim_), sigma(action_dim_);
            std::vector<bool> clamped(action_dim_);
            double log_prob = 0.0;
            for (int i = 0; i < action_dim_; ++i) {
                double ls = head[action_dim_ + i];
                clamped[i] = ls < opts_.log_std_min || ls > opts_.log_std_max;
                ls = std::clamp(ls, opts_.log_std_min, opts_.log_std_max);
                sigma[i] = std::exp(ls);
                eps[i] = gauss(rng);
                const double u = head[i] + sigma[i] * eps[i];
                t[i] = std::tanh(u);
                log_prob += -ls - 0.5 * eps[i] * eps[i] - kLogSqrt2Pi -
                            std::log(action_scale_[i] * (1.0 - t[i] * t[i]) + 1e-12);
                sa.push_back(action_center_[i] + action_scale_[i] * t[i]);
            }
            const auto q_cache = q_.forward(sa);
            const double q_value = q_cache.output()[0];
            actor_loss += (opts_.alpha * log_prob - q_value) * inv;
            std::vector<double> q_dout = {1.0};
            const auto qg = q_.backward(q_cache, q_dout);
            for (int i = 0; i < action_dim_; ++i) {
                const double dq_da = qg.input[tr->state.size() + i];
                const double da_du = action_scale_[i] * (1.0 - t[i] * t[i]);
                const double dl_du = opts_.alpha * 2.0 * t[i] - dq_da * da_du;
                dhead[i] = dl_du * inv;
                if (!clamped[i])
                    dhead[action_dim_ + i] =
                        (dl_du * sigma[i] * eps[i] - opts_.alpha) * inv;
            }
            const auto g = actor_.backward(actor_cache, dhead);
            for (std::size_t i = 0; i < actor_grads.size(); ++i) actor_grads[i] += g.params[i];
        }
        nn::adam_step(actor_.params(), actor_grads, actor_adam_);
        last_actor_loss_ = actor_loss;

        for (std::size_t i = 0; i < q_target_params_.size(); ++i)
            q_target_params_[i] += opts_.tau * (q_.params()[i] - q_target_params_[i]);
    }
    return q_loss;
}

void SacAgent::deploy(long step) {
    deployed_actor_.params() = actor_.params();
    deployed_q_.params() = q_.params();
    deployed_.parameters = concat_params();
    deployed_.version += 1;
    deployed_.created_at_step = step;
}

core::PolicySnapshot SacAgent::online_snapshot(long step) const {
    return {concat_params(), deployed_.version + 1, step};
}

void SacAgent::gaussian_deployed(std::span<const double> state, std::vector<double>& mean,
                                 std::vector<double>& log_std) const {
    actor_gaussian(deployed_actor_, state, mean, log_std);
}

void SacAgent::gaussian_online(std::span<const double> state, std::vector<double>& mean,
                               std::vector<double>& log_std) const {
    actor_gaussian(actor_, state, mean, log_std);
}

std::vector<double> SacAgent::feature_of(const nn::Mlp& q, const nn::Mlp& actor,
                                         std::span<const double> state) const {
    // Q-network hidden features at (state, actor mean action).
    std::vector<double> mean, log_std;
    actor_gaussian(actor, state, mean, log_std);
    std::vector<double> sa(state.begin(), state.end());
    const std::vector<double> a = squash(mean);
    sa.insert(sa.end(), a.begin(), a.end());
    return q.feature(q.forward(sa));
}

std::vector<double> SacAgent::feature_deployed(std::span<const double> state) const {
    return feature_of(deployed_q_, deployed_actor_, state);
}

std::vector<double> SacAgent::feature_online(std::span<const double> state) const {
    return feature_of(q_, actor_, state);
}

// --- factory ---------------------------------------------------------------

std::unique_ptr<Agent> make_agent(const std::string& id, const envs::EnvironmentSpec& spec,
                                  const core::RunConfig& config) {
    const bool small_state = spec.state_dim <= 32 && spec.actions.discrete;
    if (id == "dqn_lite") {
        DqnOptions opts;
        opts.hidden = small_state ? std::vector<int>{64, 64} : std::vector<int>{128, 128};
        return std::make_unique<DqnAgent>(spec, config, opts);
    }
    if (id == "sac_lite") {
        return std::make_unique<SacAgent>(spec, config, SacOptions{});
    }
    throw std::invalid_argument("unknown agent id: " + id);
}

const std::vector<std::string>& agent_ids() {
    static const std::vector<std::string> ids = {"dqn_lite", "sac_lite"};
    return ids;
}

}  // namespace lowswitch::agents
