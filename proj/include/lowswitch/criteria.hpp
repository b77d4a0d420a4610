#pragma once
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lowswitch/agents.hpp"
#include "lowswitch/core.hpp"
#include "lowswitch/hashing.hpp"

namespace lowswitch::criteria {

struct StepInfo {
    long step;              // global environment step k
    int episode_timestep;   // h within the current episode
    const core::Transition& transition;
    bool episode_end;       // this transition ended the episode
};

struct DecideContext {
    long step;
    bool at_reset;            // the previous transition ended an episode
    long steps_since_switch;  // env steps since the last deployment
    const core::ReplayBuffer* buffer;
    const agents::Agent* agent;
    std::mt19937_64* rng;
};

// Switching predicate. observe() sees every environment transition; decide()
// is consulted after each online update event. Only criterion-internal state
// may mutate.
class Criterion {
public:
    virtual ~Criterion() = default;
    virtual const std::string& name() const = 0;
    virtual void observe(const StepInfo& info) { (void)info; }
    virtual bool decide(const DecideContext& ctx) = 0;
    virtual void notify_switch(long step) { (void)step; }
};

// --- building blocks -------------------------------------------------------

bool fix_decide(long step, long n);  // k mod n == 0; throws if n < 1

// KL between diagonal Gaussians, KL(p || q).
double gaussian_kl(std::span<const double> mean_p, std::span<const double> log_std_p,
                   std::span<const double> mean_q, std::span<const double> log_std_q);

struct SimilarityResult {
    double mean = 1.0;        // 1 when every pair was skipped: no evidence of change
    std::size_t skipped = 0;  // zero-norm pairs excluded from the mean
};
SimilarityResult feature_similarity(const std::vector<std::vector<double>>& dep,
                                    const std::vector<std::vector<double>>& onl);

bool feature_decide(double sim, double sigma_f);  // sim <= sigma_f

bool is_power_of_two(std::uint64_t n);

// Per-episode-timestep covariance matrices Lambda_h = sum psi psi^T + lambda I
// with the reference smallest eigenvalue at the last switch.
struct InfoMatrixState {
    int dim = 0;
    double lambda = 1.0;
    std::vector<std::vector<double>> matrices;  // one dim x dim matrix per h
    std::vector<double> ref_eigenvalue;

    InfoMatrixState() = default;
    InfoMatrixState(int psi_dim, double lambda_reg, int horizon);
};

// Lambda_h += psi psi^T; fires (and moves the reference) when the smallest
// eigenvalue has doubled since the last switch at this timestep.
bool info_matrix_update_and_decide(InfoMatrixState& state, int h,
                                   std::span<const double> psi);

// Analytic representation recovery check: unit basis datasets, sign
// rectifier class with sigma(0) = 0.5, adversarial fit with the last
// alpha*k directions flipped.
struct TheoremResult {
    double similarity;
    double prediction_error;
};
TheoremResult theorem1_check(int k, double alpha);

// --- criterion catalog -----------------------------------------------------

class NoneCriterion : public Criterion {
public:
    const std::string& name() const override;
    bool decide(const DecideContext&) override { return true; }
};

class NeverCriterion : public Criterion {
public:
    const std::string& name() const override;
    bool decide(const DecideContext&) override { return false; }
};

class FixCriterion : public Criterion {
public:
    explicit FixCriterion(long n);
    const std::string& name() const override { return name_; }
    bool decide(const DecideContext& ctx) override { return fix_decide(ctx.step, n_); }

private:
    long n_;
    std::string name_;
};

struct BatchOptions {
    std::size_t window = 10000;
    std::size_t batch = 512;
};

class PolicyCriterion : public Criterion {
public:
    PolicyCriterion(double sigma_p, BatchOptions batch = {});
    const std::string& name() const override { return name_; }
    bool decide(const DecideContext& ctx) override;

private:
    double sigma_p_;
    BatchOptions batch_;
    std::string name_;
};

class FeatureCriterion : public Criterion {
public:
    FeatureCriterion(double sigma_f, BatchOptions batch = {});
    const std::string& name() const override { return name_; }
    bool decide(const DecideContext& ctx) override;
    std::size_t skipped_total() const { return skipped_total_; }

private:
    double sigma_f_;
    BatchOptions batch_;
    std::size_t skipped_total_ = 0;
    std::string name_;
};

// Only lets the inner criterion run at episode resets; forces a deployment
// unconditionally once steps_since_switch reaches force_after.
class ResetCheckWrapper : public Criterion {
public:
    ResetCheckWrapper(std::unique_ptr<Criterion> inner, long force_after);
    const std::string& name() const override { return inner_->name(); }
    void observe(const StepInfo& info) override { inner_->observe(info); }
    bool decide(const DecideContext& ctx) override;
    void notify_switch(long step) override { inner_->notify_switch(step); }

private:
    std::unique_ptr<Criterion> inner_;
    long force_after_;
};

class VisitationCriterion : public Criterion {
public:
    VisitationCriterion(const envs::EnvironmentSpec& spec, std::uint64_t seed,
                        int proj_dim = 16);
    const std::string& name() const override;
    void observe(const StepInfo& info) override;
    bool decide(const DecideContext&) override;

private:
    hashing::HashedCounter counter_;
    bool continuous_;
    bool pending_ = false;
};

class InfoMatrixCriterion : public Criterion {
public:
    InfoMatrixCriterion(const envs::EnvironmentSpec& spec, std::uint64_t seed,
                        double lambda, int proj_dim = 8);
    const std::string& name() const override;
    void observe(const StepInfo& info) override;
    bool decide(const DecideContext&) override;
    const InfoMatrixState& state() const { return state_; }

private:
    hashing::RandomProjection proj_;
    envs::ActionSpace actions_;
    InfoMatrixState state_;
    bool pending_ = false;
};

// Builds a criterion from its config; policy and feature criteria come
// wrapped in reset-checking, the others run bare.
std::unique_ptr<Criterion> make_criterion(const core::CriterionConfig& config,
                                          const envs::EnvironmentSpec& spec,
                                          std::uint64_t seed);
const std::vector<std::string>& criterion_ids();

}  // namespace lowswitch::criteria
