#include "fedrmab/belief.hpp"

#include <cmath>

#include "fedrmab/error.hpp"

namespace fedrmab {

Belief stationary_belief(const GilbertElliotDynamics& dyn) {
    if (dyn.degenerate())
        throw InvalidArgument("stationary belief undefined for absorbing dynamics (0, 1)");
    return clamp_belief(dyn.theta01 / (dyn.theta01 + 1.0 - dyn.theta11));
}

Belief propagate(const GilbertElliotDynamics& dyn, Belief b) {
    return clamp_belief(b * dyn.theta11 + (1.0 - b) * dyn.theta01);
}

Belief update_observed(const GilbertElliotDynamics& dyn, int observed_state) {
    return observed_state == 1 ? dyn.theta11 : dyn.theta01;
}

Belief k_step(const GilbertElliotDynamics& dyn, Belief b, std::uint32_t j) {
    if (j == 0) return b;
    if (dyn.degenerate())
        throw InvalidArgument("k-step belief undefined for absorbing dynamics (0, 1)");
    // T^j(b) = b0 + d^j (b - b0), d = theta11 - theta01: the passive map is affine
    // with slope d and fixed point b0.
    const double d = dyn.theta11 - dyn.theta01;
    const double denom = 1.0 + dyn.theta01 - dyn.theta11;
    const double num = dyn.theta01 - std::pow(d, static_cast<double>(j)) * (dyn.theta01 - denom * b);
    return clamp_belief(num / denom);
}

std::optional<std::uint32_t> crossing_time(const GilbertElliotDynamics& dyn, Belief from,
                                           Belief threshold, std::uint32_t cap) {
    if (dyn.degenerate()) {
        // Identity map: the belief never moves.
        return from > threshold ? std::optional<std::uint32_t>(1) : std::nullopt;
    }
    const double b0 = stationary_belief(dyn);
    const double d = std::abs(dyn.theta11 - dyn.theta01);
    for (std::uint32_t j = 1; j <= cap; ++j) {
        const Belief bj = k_step(dyn, from, j);
        if (bj > threshold) return j;
        // Converged onto the fixed point without crossing: it never will.
        if (b0 <= threshold && std::pow(d, static_cast<double>(j)) * std::abs(from - b0) < 1e-15)
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace fedrmab
