#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fedrmab/rng.hpp"

namespace fedrmab {

/// Two-state Markov (Gilbert-Elliot) channel: P[good next | bad now], P[good next | good now].
struct GilbertElliotDynamics {
    double theta01 = 0.0;
    double theta11 = 0.0;

    bool valid() const;
    /// True for the absorbing pair (0, 1) which has no unique stationary point.
    bool degenerate() const { return theta01 == 0.0 && theta11 == 1.0; }
    double row(int state) const { return state == 1 ? theta11 : theta01; }

    friend bool operator==(const GilbertElliotDynamics&, const GilbertElliotDynamics&) = default;
};

struct ArmConfig {
    GilbertElliotDynamics dynamics;
    double rate = 1.0;

    void validate() const;
};

struct Observation {
    std::size_t arm = 0;
    int state = 0;
    double reward = 0.0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Initial states drawn Bernoulli(b0) from each arm's stationary belief.
struct StationaryStart {};
/// Initial states given explicitly (one per arm, 0 or 1).
struct FixedStart {
    std::vector<int> states;
};
using InitialStateRule = std::variant<StationaryStart, FixedStart>;

/**
 * N independent two-state arms for a single agent.
 *
 * Each arm owns its own random stream derived from the agent seed, so the
 * trajectory of arm n does not depend on how many arms follow it.
 */
class Environment {
public:
    Environment(std::vector<ArmConfig> arms, std::size_t k, std::uint64_t seed,
                InitialStateRule init = StationaryStart{});

    /// Observes the selected arms in the current slot, then advances every arm one step.
    std::vector<Observation> step(std::span<const std::size_t> selected);

    std::size_t arm_count() const { return arms_.size(); }
    std::size_t k() const { return k_; }
    std::uint64_t slot() const { return t_; }
    const std::vector<ArmConfig>& arms() const { return arms_; }
    const std::vector<int>& true_states() const { return states_; }

private:
    std::vector<ArmConfig> arms_;
    std::size_t k_;
    std::vector<int> states_;
    std::vector<Rng> streams_;
    std::uint64_t t_ = 0;
};

}  // namespace fedrmab
