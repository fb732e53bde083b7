#pragma once

// Hand-rolled generators for property tests. They use the standard library
// engine on purpose so test inputs never share a code path with the library RNG.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fedrmab/env.hpp"

namespace testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
    double range(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(eng_);
    }

    /// Dynamics bounded away from the absorbing corner (0, 1).
    fedrmab::GilbertElliotDynamics dynamics(double margin = 0.01) {
        return {range(margin, 1.0 - margin), range(margin, 1.0 - margin)};
    }

    /// Dynamics with theta11 >= theta01 (positively correlated arm).
    fedrmab::GilbertElliotDynamics positive_dynamics(double margin = 0.01) {
        double a = range(margin, 1.0 - margin), b = range(margin, 1.0 - margin);
        if (a > b) std::swap(a, b);
        return {a, b};
    }

    fedrmab::GilbertElliotDynamics negative_dynamics(double margin = 0.01) {
        double a = range(margin, 1.0 - margin), b = range(margin, 1.0 - margin);
        if (a < b) std::swap(a, b);
        return {a, b};
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

/// Reference one-step passive update, written out independently of the library.
inline double passive(const fedrmab::GilbertElliotDynamics& d, double b) {
    return b * d.theta11 + (1.0 - b) * d.theta01;
}

inline double iterate_passive(const fedrmab::GilbertElliotDynamics& d, double b, unsigned j) {
    for (unsigned i = 0; i < j; ++i) b = passive(d, b);
    return b;
}

inline std::vector<fedrmab::ArmConfig> builtin_arms() {
    return {{{0.20, 0.80}, 0.4}, {{0.89, 0.17}, 0.9}, {{0.1, 0.9}, 0.7}, {{0.9, 0.16}, 0.6}};
}

}  // namespace testing
