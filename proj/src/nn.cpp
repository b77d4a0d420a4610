#include "lowswitch/nn.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

namespace lowswitch::nn {

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least two layers");
    for (int s : sizes_)
        if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
    std::size_t total = 0;
    offsets_.resize(sizes_.size() - 1);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        offsets_[l] = total;
        total += static_cast<std::size_t>(sizes_[l] + 1) * sizes_[l + 1];
    }
    params_.assign(total, 0.0);
}

Mlp Mlp::random_init(std::vector<int> layer_sizes, std::uint64_t seed) {
    Mlp net(std::move(layer_sizes));
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < net.sizes_.size(); ++l) {
        double bound = 1.0 / std::sqrt(static_cast<double>(net.sizes_[l]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        std::size_t n = static_cast<std::size_t>(net.sizes_[l] + 1) * net.sizes_[l + 1];
        for (std::size_t i = 0; i < n; ++i) net.params_[net.offsets_[l] + i] = dist(rng);
    }
    return net;
}

int Mlp::feature_dim() const {
    return sizes_.size() > 2 ? sizes_[sizes_.size() - 2] : 0;
}

ForwardCache Mlp::forward(std::span<const double> input) const {
    if (static_cast<int>(input.size()) != sizes_.front())
        throw std::invalid_argument("Mlp::forward: input dimension mismatch");
    ForwardCache cache;
    cache.activations.reserve(sizes_.size());
    cache.activations.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const int in = sizes_[l], out = sizes_[l + 1];
        const double* w = params_.data() + offsets_[l];
        const double* b = w + static_cast<std::size_t>(in) * out;
        const std::vector<double>& x = cache.activations.back();
        std::vector<double> y(out);
        const bool hidden = l + 2 < sizes_.size();
        for (int i = 0; i < out; ++i) {
            double acc = b[i];
            const double* row = w + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) acc += row[j] * x[j];
            y[i] = hidden && acc < 0.0 ? 0.0 : acc;
        }
        cache.activations.push_back(std::move(y));
    }
    return cache;
}

std::vector<double> Mlp::feature(const ForwardCache& cache) const {
    if (cache.activations.size() != sizes_.size())
        throw std::logic_error("Mlp::feature: cache does not match this network");
    if (sizes_.size() == 2) return cache.activations.front();
    return cache.activations[cache.activations.size() - 2];
}

Mlp::Gradients Mlp::backward(const ForwardCache& cache,
                             std::span<const double> output_gradient) const {
    if (cache.activations.size() != sizes_.size())
        throw std::logic_error("Mlp::backward: forward pass not cached for this input");
    if (static_cast<int>(output_gradient.size()) != sizes_.back())
        throw std::invalid_argument("Mlp::backward: output gradient dimension mismatch");

    Gradients g;
    g.params.assign(params_.size(), 0.0);
    std::vector<double> delta(output_gradient.begin(), output_gradient.end());
    for (int l = static_cast<int>(sizes_.size()) - 2; l >= 0; --l) {
        const int in = sizes_[l], out = sizes_[l + 1];
        const double* w = params_.data() + offsets_[l];
        double* gw = g.params.data() + offsets_[l];
        double* gb = gw + static_cast<std::size_t>(in) * out;
        const std::vector<double>& x = cache.activations[l];
        for (int i = 0; i < out; ++i) {
            const double d = delta[i];
            double* grow = gw + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) grow[j] += d * x[j];
            gb[i] += d;
        }
        std::vector<double> prev(in, 0.0);
        for (int i = 0; i < out; ++i) {
            const double d = delta[i];
            const double* row = w + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) prev[j] += row[j] * d;
        }
        if (l > 0) {
            // ReLU subgradient: zero at and below zero.
            for (int j = 0; j < in; ++j)
                if (x[j] <= 0.0) prev[j] = 0.0;
        }
        delta = std::move(prev);
    }
    g.input = std::move(delta);
    return g;
}

std::vector<std::uint8_t> Mlp::serialize() const {
    // Header: 'LSNN', u32 layer count, u32 sizes; then raw doubles.
    std::vector<std::uint8_t> blob;
    blob.reserve(8 + 4 * sizes_.size() + 8 * params_.size());
    const char magic[4] = {'L', 'S', 'N', 'N'};
    blob.insert(blob.end(), magic, magic + 4);
    auto put_u32 = [&blob](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) blob.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    put_u32(static_cast<std::uint32_t>(sizes_.size()));
    for (int s : sizes_) put_u32(static_cast<std::uint32_t>(s));
    std::size_t base = blob.size();
    blob.resize(base + 8 * params_.size());
    std::memcpy(blob.data() + base, params_.data(), 8 * params_.size());
    return blob;
}

Mlp Mlp::deserialize(std::span<const std::uint8_t> blob) {
    auto fail = [] { throw std::invalid_argument("Mlp::deserialize: malformed blob"); };
    if (blob.size() < 8 || std::memcmp(blob.data(), "LSNN", 4) != 0) fail();
    std::size_t pos = 4;
    auto get_u32 = [&blob, &pos, &fail]() -> std::uint32_t {
        if (pos + 4 > blob.size()) fail();
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(blob[pos + i]) << (8 * i);
        pos += 4;
        return v;
    };
    std::uint32_t count = get_u32();
    if (count < 2 || count > 64) fail();
    std::vector<int> sizes(count);
    for (auto& s : sizes) s = static_cast<int>(get_u32());
    Mlp net(sizes);
    if (blob.size() - pos != 8 * net.params_.size()) fail();
    std::memcpy(net.params_.data(), blob.data() + pos, 8 * net.params_.size());
    return net;
}

void adam_step(std::vector<double>& params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: length mismatch");
    for (double g : grads)
        if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

}  // namespace lowswitch::nn
