#include "lowswitch/criteria.hpp"

#include <cmath>

#include "lowswitch/linalg.hpp"

namespace lowswitch::criteria {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed + salt * 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kSaltVisitation = 11;
constexpr std::uint64_t kSaltInfoMatrix = 12;

std::vector<double> action_encoding(const envs::ActionSpace& actions, const envs::Action& a) {
    if (actions.discrete) return hashing::one_hot(a.index, actions.count);
    return a.values;
}

}  // namespace

bool fix_decide(long step, long n) {
    if (n < 1) throw std::invalid_argument("fix_decide: interval must be >= 1");
    return step % n == 0;
}

double gaussian_kl(std::span<const double> mean_p, std::span<const double> log_std_p,
                   std::span<const double> mean_q, std::span<const double> log_std_q) {
    if (mean_p.size() != mean_q.size() || mean_p.size() != log_std_p.size() ||
        mean_p.size() != log_std_q.size())
        throw std::invalid_argument("gaussian_kl: dimension mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < mean_p.size(); ++i) {
        const double var_p = std::exp(2.0 * log_std_p[i]);
        const double var_q = std::exp(2.0 * log_std_q[i]);
        const double dm = mean_p[i] - mean_q[i];
        kl += log_std_q[i] - log_std_p[i] + (var_p + dm * dm) / (2.0 * var_q) - 0.5;
    }
    return kl;
}

SimilarityResult feature_similarity(const std::vector<std::vector<double>>& dep,
                                    const std::vector<std::vector<double>>& onl) {
    if (dep.size() != onl.size())
        throw std::invalid_argument("feature_similarity: batch size mismatch");
    SimilarityResult result;
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < dep.size(); ++i) {
        if (dep[i].size() != onl[i].size())
            throw std::invalid_argument("feature_similarity: feature dimension mismatch");
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t j = 0; j < dep[i].size(); ++j) {
            dot += dep[i][j] * onl[i][j];
            na += dep[i][j] * dep[i][j];
            nb += onl[i][j] * onl[i][j];
        }
        if (na == 0.0 || nb == 0.0) {
            ++result.skipped;
            continue;
        }
        sum += dot / std::sqrt(na * nb);
        ++used;
    }
    result.mean = used == 0 ? 1.0 : sum / static_cast<double>(used);
    return result;
}

bool feature_decide(double sim, double sigma_f) { return sim <= sigma_f; }

bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

InfoMatrixState::InfoMatrixState(int psi_dim, double lambda_reg, int horizon)
    : dim(psi_dim), lambda(lambda_reg) {
    if (psi_dim < 1 || horizon < 1 || lambda_reg <= 0.0)
        throw std::invalid_argument("InfoMatrixState: bad parameters");
    std::vector<double> identity(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) identity[i * dim + i] = lambda;
    matrices.assign(horizon, identity);
    ref_eigenvalue.assign(horizon, lambda);
}

bool info_matrix_update_and_decide(InfoMatrixState& state, int h, std::span<const double> psi) {
    if (h < 0 || h >= static_cast<int>(state.matrices.size()))
        throw std::invalid_argument("info_matrix_update_and_decide: timestep out of range");
    if (static_cast<int>(psi.size()) != state.dim)
        throw std::invalid_argument("info_matrix_update_and_decide: psi dimension mismatch");
    for (double v : psi)
        if (!std::isfinite(v))
            throw std::runtime_error("info_matrix_update_and_decide: non-finite psi");
    std::vector<double>& m = state.matrices[h];
    const int d = state.dim;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m[i * d + j] += psi[i] * psi[j];
    const double v = linalg::smallest_eigenvalue(m, d);
    if (v >= 2.0 * state.ref_eigenvalue[h]) {
        state.ref_eigenvalue[h] = v;
        return true;
    }
    return false;
}

TheoremResult theorem1_check(int k, double alpha) {
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("theorem1_check: k must be even, >= 2");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("theorem1_check: alpha must be in (0, 1)");
    const double flips_real = alpha * k;
    const int flips = static_cast<int>(std::lround(flips_real));
    if (std::abs(flips_real - flips) > 1e-9)
        throw std::invalid_argument("theorem1_check: alpha * k must be an integer");

    // Direction signs: +1 is e_i, -1 is -e_i. The reference solution keeps
    // all of them; the adversarial fit flips the last alpha*k.
    std::vector<int> star(k, 1), adv(k, 1);
    for (int i = k - flips; i < k; ++i) adv[i] = -1;

    int matching = 0;
    for (int i = 0; i < k; ++i)
        if (adv[i] == star[i]) ++matching;

    // Evaluate the adversarial predictor on every basis input. Coordinate j
    // sees <v_j, e_i>: 0 off the diagonal (rectifier at 0 gives 0.5, mapped
    // to 0) and +-1 on it, so the prediction is the direction sign itself.
    double error = 0.0;
    for (int i = 0; i < k; ++i) {
        double pred = 0.0;
        for (int j = 0; j < k; ++j) {
            const double z = j == i ? static_cast<double>(adv[j]) : 0.0;
            const double rect = z > 0.0 ? z : (z == 0.0 ? 0.5 : 0.0);
            pred += 2.0 * rect - 1.0;
        }
        const double y = 1.0;
        error += (pred - y) * (pred - y) / 4.0;
    }
    return {static_cast<double>(matching) / k, error / k};
}

// --- catalog ---------------------------------------------------------------

const std::string& NoneCriterion::name() const {
    static const std::string n = "none";
    return n;
}

const std::string& NeverCriterion::name() const {
    static const std::string n = "never";
    return n;
}

FixCriterion::FixCriterion(long n) : n_(n), name_("fix_n" + std::to_string(n)) {
    if (n < 1) throw std::invalid_argument("FixCriterion: interval must be >= 1");
}

PolicyCriterion::PolicyCriterion(double sigma_p, BatchOptions batch)
    : sigma_p_(sigma_p), batch_(batch), name_("policy") {
    if (sigma_p < 0.0) throw std::invalid_argument("PolicyCriterion: sigma must be >= 0");
}

bool PolicyCriterion::decide(const DecideContext& ctx) {
    const auto batch = core::sample_recent(*ctx.buffer, batch_.window, batch_.batch, *ctx.rng);
    if (ctx.agent->discrete()) {
        std::size_t mismatched = 0;
        for (const core::Transition* tr : batch)
            if (ctx.agent->greedy_deployed(tr->state) != ctx.agent->greedy_online(tr->state))
                ++mismatched;
        return static_cast<double>(mismatched) / batch.size() >= sigma_p_;
    }
    double kl_sum = 0.0;
    std::vector<double> mp, lp, mq, lq;
    for (const core::Transition* tr : batch) {
        ctx.agent->gaussian_deployed(tr->state, mp, lp);
        ctx.agent->gaussian_online(tr->state, mq, lq);
        kl_sum += gaussian_kl(mp, lp, mq, lq);
    }
    return kl_sum / batch.size() >= sigma_p_;
}

FeatureCriterion::FeatureCriterion(double sigma_f, BatchOptions batch)
    : sigma_f_(sigma_f), batch_(batch), name_("feature") {
    if (sigma_f < 0.0 || sigma_f > 1.0)
        throw std::invalid_argument("FeatureCriterion: sigma must be in [0, 1]");
}

bool FeatureCriterion::decide(const DecideContext& ctx) {
    const auto batch = core::sample_recent(*ctx.buffer, batch_.window, batch_.batch, *ctx.rng);
    std::vector<std::vector<double>> dep, onl;
    dep.reserve(batch.size());
    onl.reserve(batch.size());
    for (const core::Transition* tr : batch) {
        dep.push_back(ctx.agent->feature_deployed(tr->state));
        onl.push_back(ctx.agent->feature_online(tr->state));
    }
    const SimilarityResult sim = feature_similarity(dep, onl);
    skipped_total_ += sim.skipped;
    return feature_decide(sim.mean, sigma_f_);
}

ResetCheckWrapper::ResetCheckWrapper(std::unique_ptr<Criterion> inner, long force_after)
    : inner_(std::move(inner)), force_after_(force_after) {
    if (force_after < 1) throw std::invalid_argument("ResetCheckWrapper: force_after must be >= 1");
}

bool ResetCheckWrapper::decide(const DecideContext& ctx) {
    if (ctx.steps_since_switch >= force_after_) return true;
    if (!ctx.at_reset) return false;
    return inner_->decide(ctx);
}

VisitationCriterion::VisitationCriterion(const envs::EnvironmentSpec& spec, std::uint64_t seed,
                                         int proj_dim)
    : counter_(hashing::RandomProjection(proj_dim, spec.state_dim,
                                         mix_seed(seed, kSaltVisitation))),
      continuous_(!spec.actions.discrete) {}

const std::string& VisitationCriterion::name() const {
    static const std::string n = "visitation";
    return n;
}

void VisitationCriterion::observe(const StepInfo& info) {
    // Continuous actions have no exact keys; count per hashed state instead.
    const std::int64_t action = continuous_ ? -1 : info.transition.action.index;
    const std::uint64_t n = counter_.observe(info.transition.state, action);
    if (is_power_of_two(n)) pending_ = true;
}

bool VisitationCriterion::decide(const DecideContext&) {
    const bool fire = pending_;
    pending_ = false;
    return fire;
}

InfoMatrixCriterion::InfoMatrixCriterion(const envs::EnvironmentSpec& spec, std::uint64_t seed,
                                         double lambda, int proj_dim)
    : proj_(proj_dim, spec.state_dim, mix_seed(seed, kSaltInfoMatrix)),
      actions_(spec.actions),
      state_(proj_dim + (spec.actions.discrete ? spec.actions.count : spec.actions.dim), lambda,
             spec.max_episode_length) {}

const std::string& InfoMatrixCriterion::name() const {
    static const std::string n = "info";
    return n;
}

void InfoMatrixCriterion::observe(const StepInfo& info) {
    const std::vector<double> enc = action_encoding(actions_, info.transition.action);
    const std::vector<double> features = hashing::psi(proj_, info.transition.state, enc);
    if (info_matrix_update_and_decide(state_, info.episode_timestep, features)) pending_ = true;
}

bool InfoMatrixCriterion::decide(const DecideContext&) {
    const bool fire = pending_;
    pending_ = false;
    return fire;
}

std::unique_ptr<Criterion> make_criterion(const core::CriterionConfig& config,
                                          const envs::EnvironmentSpec& spec,
                                          std::uint64_t seed) {
    auto param = [&config](const std::string& key, double fallback) {
        auto it = config.params.find(key);
        return it == config.params.end() ? fallback : it->second;
    };
    const bool discrete = spec.actions.discrete;
    if (config.id == "none") return std::make_unique<NoneCriterion>();
    if (config.id == "never") return std::make_unique<NeverCriterion>();
    if (config.id == "fix")
        return std::make_unique<FixCriterion>(static_cast<long>(param("n", 1000)));
    if (config.id == "policy") {
        auto inner = std::make_unique<PolicyCriterion>(param("sigma", discrete ? 0.5 : 1.0));
        return std::make_unique<ResetCheckWrapper>(std::move(inner),
                                                   static_cast<long>(param("force", 10000)));
    }
    if (config.id == "feature") {
        auto inner = std::make_unique<FeatureCriterion>(param("sigma", discrete ? 0.97 : 0.8));
        return std::make_unique<ResetCheckWrapper>(std::move(inner),
                                                   static_cast<long>(param("force", 10000)));
    }
    if (config.id == "visitation") return std::make_unique<VisitationCriterion>(spec, seed);
    if (config.id == "info")
        return std::make_unique<InfoMatrixCriterion>(spec, seed, param("lambda", 1.0));
    throw std::invalid_argument("unknown criterion id: " + config.id);
}

const std::vector<std::string>& criterion_ids() {
    static const std::vector<std::string> ids = {"none", "fix",        "policy",
                                                 "feature", "visitation", "info"};
    return ids;
}

}  // namespace lowswitch::criteria
