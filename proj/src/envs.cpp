#include "lowswitch/envs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace lowswitch::envs {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_discrete_action(const EnvironmentSpec& spec, const Action& a) {
    if (a.index < 0 || a.index >= spec.actions.count)
        throw std::invalid_argument("action index out of range");
}

// 5x5 grid, start (0,0), goal (4,4). Actions 0=up 1=down 2=left 3=right,
// clamped at the borders. Reward 1 on reaching the goal, else 0.
class GridWorld final : public Environment {
public:
    GridWorld() {
        spec_.state_dim = kSize * kSize;
        spec_.actions = {true, 4, 0, {}, {}};
        spec_.max_episode_length = 100;
        spec_.reward_min = 0.0;
        spec_.reward_max = 1.0;
    }

    const EnvironmentSpec& spec() const override { return spec_; }

    std::vector<double> reset(std::mt19937_64&) override {
        row_ = 0;
        col_ = 0;
        steps_ = 0;
        done_ = false;
        return encode();
    }

    StepResult step(const Action& a) override {
        if (done_) throw std::logic_error("GridWorld::step after terminal");
        check_discrete_action(spec_, a);
        switch (a.index) {
            case 0: row_ = std::max(0, row_ - 1); break;
            case 1: row_ = std::min(kSize - 1, row_ + 1); break;
            case 2: col_ = std::max(0, col_ - 1); break;
            case 3: col_ = std::min(kSize - 1, col_ + 1); break;
        }
        ++steps_;
        const bool goal = row_ == kSize - 1 && col_ == kSize - 1;
        done_ = goal || steps_ >= spec_.max_episode_length;
        return {encode(), goal ? 1.0 : 0.0, done_};
    }

private:
    static constexpr int kSize = 5;
    std::vector<double> encode() const {
        std::vector<double> s(kSize * kSize, 0.0);
        s[row_ * kSize + col_] = 1.0;
        return s;
    }
    EnvironmentSpec spec_;
    int row_ = 0, col_ = 0, steps_ = 0;
    bool done_ = false;
};

// N-state chain, start at 0. Action 1 moves right, action 0 moves left
// (clamped at 0). Reaching the last state pays 1 and ends the episode; the
// left action at state 0 pays a small distractor reward.
class ChainMdp final : public Environment {
public:
    explicit ChainMdp(int n) : n_(n) {
        spec_.state_dim = n;
        spec_.actions = {true, 2, 0, {}, {}};
        spec_.max_episode_length = 50;
        spec_.reward_min = 0.0;
        spec_.reward_max = 1.0;
    }

    const EnvironmentSpec& spec() const override { return spec_; }

    std::vector<double> reset(std::mt19937_64&) override {
        pos_ = 0;
        steps_ = 0;
        done_ = false;
        return encode();
    }

    StepResult step(const Action& a) override {
        if (done_) throw std::logic_error("ChainMdp::step after terminal");
        check_discrete_action(spec_, a);
        double reward = 0.0;
        if (a.index == 1) {
            pos_ = std::min(n_ - 1, pos_ + 1);
        } else {
            if (pos_ == 0) reward = 0.01;
            pos_ = std::max(0, pos_ - 1);
        }
        ++steps_;
        const bool goal = pos_ == n_ - 1;
        if (goal) reward = 1.0;
        done_ = goal || steps_ >= spec_.max_episode_length;
        return {encode(), reward, done_};
    }

private:
    std::vector<double> encode() const {
        std::vector<double> s(n_, 0.0);
        s[pos_] = 1.0;
        return s;
    }
    int n_;
    EnvironmentSpec spec_;
    int pos_ = 0, steps_ = 0;
    bool done_ = false;
};

// Cart-pole with explicit Euler integration. Constants: gravity 9.8,
// cart mass 1.0, pole mass 0.1, half-length 0.5, force 10.0, dt 0.02,
// fail at |x| > 2.4 or |theta| > 12 deg. Reward 1 per surviving step and 0
// on the terminating step.
class CartPoleLite final : public Environment {
public:
    CartPoleLite() {
        spec_.state_dim = 4;
        spec_.actions = {true, 2, 0, {}, {}};
        spec_.max_episode_length = 200;
        spec_.reward_min = 0.0;
        spec_.reward_max = 1.0;
    }

    const EnvironmentSpec& spec() const override { return spec_; }

    std::vector<double> reset(std::mt19937_64& rng) override {
        std::uniform_real_distribution<double> dist(-0.05, 0.05);
        for (double& v : state_) v = dist(rng);
        steps_ = 0;
        done_ = false;
        return {state_.begin(), state_.end()};
    }

    StepResult step(const Action& a) override {
        if (done_) throw std::logic_error("CartPoleLite::step after terminal");
        check_discrete_action(spec_, a);
        state_ = integrate(state_, a.index);
        ++steps_;
        const bool fell = std::abs(state_[0]) > kXLimit || std::abs(state_[2]) > kThetaLimit;
        done_ = fell || steps_ >= spec_.max_episode_length;
        return {{state_.begin(), state_.end()}, fell ? 0.0 : 1.0, done_};
    }

    // One Euler step; exposed so tests can integrate by hand.
    static std::array<double, 4> integrate(const std::array<double, 4>& s, int action) {
        const double force = action == 1 ? kForce : -kForce;
        const double x = s[0], xdot = s[1], theta = s[2], thetadot = s[3];
        const double costh = std::cos(theta), sinth = std::sin(theta);
        const double total_mass = kMassCart + kMassPole;
        const double temp =
            (force + kMassPole * kLength * thetadot * thetadot * sinth) / total_mass;
        const double thetaacc =
            (kGravity * sinth - costh * temp) /
            (kLength * (4.0 / 3.0 - kMassPole * costh * costh / total_mass));
        const double xacc = temp - kMassPole * kLength * thetaacc * costh / total_mass;
        return {x + kDt * xdot, xdot + kDt * xacc, theta + kDt * thetadot,
                thetadot + kDt * thetaacc};
    }

    static constexpr double kGravity = 9.8;
    static constexpr double kMassCart = 1.0;
    static constexpr double kMassPole = 0.1;
    static constexpr double kLength = 0.5;
    static constexpr double kForce = 10.0;
    static constexpr double kDt = 0.02;
    static constexpr double kXLimit = 2.4;
    static constexpr double kThetaLimit = 12.0 * kPi / 180.0;

private:
    EnvironmentSpec spec_;
    std::array<double, 4> state_{};
    int steps_ = 0;
    bool done_ = false;
};

// Torque-controlled pendulum. Observation (cos theta, sin theta, thetadot),
// torque in [-2, 2], cost -(theta^2 + 0.1 thetadot^2 + 0.001 u^2) with theta
// normalized to (-pi, pi]. Constants: g 10, m 1, l 1, dt 0.05, speed limit 8.
// Episodes always run the full horizon.
class PendulumLite final : public Environment {
public:
    PendulumLite() {
        spec_.state_dim = 3;
        spec_.actions = {false, 0, 1, {-2.0}, {2.0}};
        spec_.max_episode_length = 200;
        spec_.reward_max = 0.0;
        spec_.reward_min = -(kPi * kPi + 0.1 * 64.0 + 0.001 * 4.0);
    }

    const EnvironmentSpec& spec() const override { return spec_; }

    std::vector<double> reset(std::mt19937_64& rng) override {
        std::uniform_real_distribution<double> angle(-kPi, kPi);
        std::uniform_real_distribution<double> speed(-1.0, 1.0);
        theta_ = angle(rng);
        thetadot_ = speed(rng);
        steps_ = 0;
        done_ = false;
        return encode();
    }

    StepResult step(const Action& a) override {
        if (done_) throw std::logic_error("PendulumLite::step after terminal");
        if (a.values.size() != 1) throw std::invalid_argument("expected 1-dim torque");
        const double u = std::clamp(a.values[0], -2.0, 2.0);
        const double th = normalize(theta_);
        const double cost = th * th + 0.1 * thetadot_ * thetadot_ + 0.001 * u * u;
        thetadot_ += kDt * (3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
                            3.0 * u / (kMass * kLength * kLength));
        thetadot_ = std::clamp(thetadot_, -kMaxSpeed, kMaxSpeed);
        theta_ += kDt * thetadot_;
        ++steps_;
        done_ = steps_ >= spec_.max_episode_length;
        return {encode(), -cost, done_};
    }

    static double normalize(double theta) {
        double t = std::fmod(theta + kPi, 2.0 * kPi);
        if (t < 0) t += 2.0 * kPi;
        return t - kPi;
    }

    static constexpr double kGravity = 10.0;
    static constexpr double kMass = 1.0;
    static constexpr double kLength = 1.0;
    static constexpr double kDt = 0.05;
    static constexpr double kMaxSpeed = 8.0;

private:
    std::vector<double> encode() const {
        return {std::cos(theta_), std::sin(theta_), thetadot_};
    }
    EnvironmentSpec spec_;
    double theta_ = 0.0, thetadot_ = 0.0;
    int steps_ = 0;
    bool done_ = false;
};

}  // namespace

std::unique_ptr<Environment> make_environment(const std::string& id) {
    if (id == "gridworld5") return std::make_unique<GridWorld>();
    if (id == "chain10") return std::make_unique<ChainMdp>(10);
    if (id == "cartpole_lite") return std::make_unique<CartPoleLite>();
    if (id == "pendulum_lite") return std::make_unique<PendulumLite>();
    throw std::invalid_argument("unknown environment id: " + id);
}

const std::vector<std::string>& environment_ids() {
    static const std::vector<std::string> ids = {"gridworld5", "chain10", "cartpole_lite",
                                                 "pendulum_lite"};
    return ids;
}

double max_episode_return(const std::string& id) {
    if (id == "gridworld5" || id == "chain10") return 1.0;
    if (id == "cartpole_lite") return 200.0;  // horizon truncation still pays 1
    if (id == "pendulum_lite") return 0.0;
    throw std::invalid_argument("unknown environment id: " + id);
}

}  // namespace lowswitch::envs
