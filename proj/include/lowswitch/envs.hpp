#pragma once
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace lowswitch::envs {

struct ActionSpace {
    bool discrete = true;
    int count = 0;             // discrete only
    int dim = 0;               // continuous only
    std::vector<double> low;   // continuous bounds, elementwise
    std::vector<double> high;
};

struct EnvironmentSpec {
    int state_dim = 0;
    ActionSpace actions;
    int max_episode_length = 0;
    double reward_min = 0.0;
    double reward_max = 0.0;
};

struct Action {
    int index = 0;               // discrete
    std::vector<double> values;  // continuous
};

struct StepResult {
    std::vector<double> next_state;
    double reward = 0.0;
    bool terminal = false;
};

class Environment {
public:
    virtual ~Environment() = default;
    virtual const EnvironmentSpec& spec() const = 0;
    virtual std::vector<double> reset(std::mt19937_64& rng) = 0;
    // Throws std::logic_error if the episode already ended and
    // std::invalid_argument for out-of-range actions.
    virtual StepResult step(const Action& action) = 0;
};

// Ids: gridworld5, chain10, cartpole_lite, pendulum_lite.
std::unique_ptr<Environment> make_environment(const std::string& id);
const std::vector<std::string>& environment_ids();

// Best achievable undiscounted episode return, used by reporting.
double max_episode_return(const std::string& id);

}  // namespace lowswitch::envs
