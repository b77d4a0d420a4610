#pragma once
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace lowswitch::hashing {

// Fixed Gaussian matrix A; phi(x) = sign(A x) with sign(0) := +1.
// Patterns are packed into a 64-bit key (bit i set when component i >= 0),
// which is injective for proj_dim <= 63.
class RandomProjection {
public:
    RandomProjection(int proj_dim, int input_dim, std::uint64_t seed);

    int proj_dim() const { return proj_dim_; }
    int input_dim() const { return input_dim_; }

    std::uint64_t project(std::span<const double> state) const;
    // Same pattern as +-1.0 reals.
    std::vector<double> signs(std::span<const double> state) const;

private:
    int proj_dim_;
    int input_dim_;
    std::vector<double> matrix_;  // row-major proj_dim x input_dim
};

class HashedCounter {
public:
    explicit HashedCounter(RandomProjection projection);

    const RandomProjection& projection() const { return proj_; }

    // Increments and returns the count for phi(state) (optionally keyed
    // together with a discrete action).
    std::uint64_t observe(std::span<const double> state);
    std::uint64_t observe(std::span<const double> state, std::int64_t action);

    std::uint64_t count(std::span<const double> state) const;
    std::uint64_t count(std::span<const double> state, std::int64_t action) const;
    std::uint64_t total() const { return total_; }

private:
    struct KeyHash {
        std::size_t operator()(const std::pair<std::uint64_t, std::int64_t>& k) const;
    };
    RandomProjection proj_;
    std::unordered_map<std::pair<std::uint64_t, std::int64_t>, std::uint64_t, KeyHash> table_;
    std::uint64_t total_ = 0;
};

// psi(x, a) = [phi(x), a]: sign pattern as +-1 reals followed by the action
// encoding (one-hot for discrete, raw vector for continuous).
std::vector<double> psi(const RandomProjection& proj, std::span<const double> state,
                        std::span<const double> action_encoding);

std::vector<double> one_hot(int index, int count);

}  // namespace lowswitch::hashing
