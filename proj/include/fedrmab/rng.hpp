#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace fedrmab {

/**
 * xoshiro256** seeded through splitmix64.
 *
 * Every variate (uniform, normal, gamma, beta) is derived here from the raw
 * 64-bit stream, so sequences are identical across standard libraries and
 * platforms. std::*_distribution is deliberately not used.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    std::uint64_t next();

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    bool bernoulli(double p) { return uniform() < p; }
    /// Uniform integer on [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);
    double normal();
    double gamma(double shape);
    double beta(double a, double b);

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> s_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Child seed for an indexed sub-stream (agent m, arm n, trial i, ...).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);
/// Child seed for a named sub-stream ("server", "policy", ...).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view name);

}  // namespace fedrmab
