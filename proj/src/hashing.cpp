#include "lowswitch/hashing.hpp"

#include <random>
#include <stdexcept>

namespace lowswitch::hashing {

RandomProjection::RandomProjection(int proj_dim, int input_dim, std::uint64_t seed)
    : proj_dim_(proj_dim), input_dim_(input_dim) {
    if (proj_dim < 1 || proj_dim > 63)
        throw std::invalid_argument("RandomProjection: proj_dim must be in [1, 63]");
    if (input_dim < 1) throw std::invalid_argument("RandomProjection: input_dim must be positive");
    matrix_.resize(static_cast<std::size_t>(proj_dim) * input_dim);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : matrix_) v = gauss(rng);
}

std::uint64_t RandomProjection::project(std::span<const double> state) const {
    if (static_cast<int>(state.size()) != input_dim_)
        throw std::invalid_argument("RandomProjection::project: dimension mismatch");
    std::uint64_t key = 0;
    for (int i = 0; i < proj_dim_; ++i) {
        const double* row = matrix_.data() + static_cast<std::size_t>(i) * input_dim_;
        double acc = 0.0;
        for (int j = 0; j < input_dim_; ++j) acc += row[j] * state[j];
        if (acc >= 0.0) key |= std::uint64_t{1} << i;  // sign(0) := +1
    }
    return key;
}

std::vector<double> RandomProjection::signs(std::span<const double> state) const {
    const std::uint64_t key = project(state);
    std::vector<double> out(proj_dim_);
    for (int i = 0; i < proj_dim_; ++i)
        out[i] = (key >> i) & 1 ? 1.0 : -1.0;
    return out;
}

std::size_t HashedCounter::KeyHash::operator()(
    const std::pair<std::uint64_t, std::int64_t>& k) const {
    // splitmix64 over the combined key
    std::uint64_t x = k.first ^ (static_cast<std::uint64_t>(k.second) * 0x9e3779b97f4a7c15ull);
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return static_cast<std::size_t>(x ^ (x >> 31));
}

HashedCounter::HashedCounter(RandomProjection projection) : proj_(std::move(projection)) {}

std::uint64_t HashedCounter::observe(std::span<const double> state) {
    return observe(state, -1);
}

std::uint64_t HashedCounter::observe(std::span<const double> state, std::int64_t action) {
    ++total_;
    return ++table_[{proj_.project(state), action}];
}

std::uint64_t HashedCounter::count(std::span<const double> state) const {
    return count(state, -1);
}

std::uint64_t HashedCounter::count(std::span<const double> state, std::int64_t action) const {
    auto it = table_.find({proj_.project(state), action});
    return it == table_.end() ? 0 : it->second;
}

std::vector<double> psi(const RandomProjection& proj, std::span<const double> state,
                        std::span<const double> action_encoding) {
    std::vector<double> out = proj.signs(state);
    out.insert(out.end(), action_encoding.begin(), action_encoding.end());
    return out;
}

std::vector<double> one_hot(int index, int count) {
    if (index < 0 || index >= count) throw std::invalid_argument("one_hot: index out of range");
    std::vector<double> v(count, 0.0);
    v[index] = 1.0;
    return v;
}

}  // namespace lowswitch::hashing
