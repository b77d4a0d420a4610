#pragma once
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace lowswitch::nn {

// Activations per layer, kept so the backward pass can be replayed.
// activations[0] is the input, activations.back() the network output.
struct ForwardCache {
    std::vector<std::vector<double>> activations;
    const std::vector<double>& output() const { return activations.back(); }
};

// Fully connected network, ReLU on hidden layers, identity output.
// Parameters live in one flat vector (per layer: row-major weights, then
// biases) so snapshots and optimizer state are plain vector copies.
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(std::vector<int> layer_sizes);

    // Uniform init in +-1/sqrt(fan_in).
    static Mlp random_init(std::vector<int> layer_sizes, std::uint64_t seed);

    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }
    // Width of the last hidden layer; 0 for a linear net.
    int feature_dim() const;
    const std::vector<int>& layer_sizes() const { return sizes_; }
    std::size_t param_count() const { return params_.size(); }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    ForwardCache forward(std::span<const double> input) const;
    // Activation vector of the final hidden layer (the input itself for a
    // linear net).
    std::vector<double> feature(const ForwardCache& cache) const;

    struct Gradients {
        std::vector<double> params;
        std::vector<double> input;
    };
    // Gradient of output . output_gradient w.r.t. parameters and input.
    Gradients backward(const ForwardCache& cache,
                       std::span<const double> output_gradient) const;

    // Flat little-endian blob with an architecture header.
    std::vector<std::uint8_t> serialize() const;
    static Mlp deserialize(std::span<const std::uint8_t> blob);

private:
    std::vector<int> sizes_;
    std::vector<double> params_;
    // Offset of layer l's weight block; biases follow the weights.
    std::vector<std::size_t> offsets_;
};

struct AdamState {
    std::vector<double> m, v;
    long step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1.5e-4;

    AdamState() = default;
    AdamState(std::size_t n, double learning_rate, double epsilon = 1.5e-4)
        : m(n, 0.0), v(n, 0.0), lr(learning_rate), eps(epsilon) {}
};

// Standard bias-corrected adaptive-moment update, in place.
void adam_step(std::vector<double>& params, std::span<const double> grads,
               AdamState& state);

}  // namespace lowswitch::nn
