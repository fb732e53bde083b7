#pragma once

#include <cstdint>
#include <optional>

#include "fedrmab/env.hpp"

namespace fedrmab {

/// Probability that a two-state arm is currently in the good state.
using Belief = double;

inline constexpr std::uint32_t kDefaultCrossingCap = 10000;

/// theta01 / (theta01 + 1 - theta11). Throws InvalidArgument for the absorbing pair (0, 1).
Belief stationary_belief(const GilbertElliotDynamics& dyn);

/// One passive step: b*theta11 + (1-b)*theta01.
Belief propagate(const GilbertElliotDynamics& dyn, Belief b);

/// Belief for the next slot after observing the arm in `observed_state`.
Belief update_observed(const GilbertElliotDynamics& dyn, int observed_state);

/// j passive steps in closed form. j == 0 returns b.
Belief k_step(const GilbertElliotDynamics& dyn, Belief b, std::uint32_t j);

/**
 * Smallest j in [1, cap] with k_step(dyn, from, j) > threshold, or nullopt if
 * no such j exists within the cap.
 */
std::optional<std::uint32_t> crossing_time(const GilbertElliotDynamics& dyn, Belief from,
                                           Belief threshold,
                                           std::uint32_t cap = kDefaultCrossingCap);

inline Belief clamp_belief(double b) { return b < 0.0 ? 0.0 : (b > 1.0 ? 1.0 : b); }

}  // namespace fedrmab
