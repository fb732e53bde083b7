#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedrmab/env.hpp"
#include "fedrmab/rng.hpp"

namespace fedrmab {

inline constexpr double kDynamicsEps = 1e-6;

/**
 * Transition counts observed by one agent, gated on consecutive selections.
 * Flat layout (also the wire layout): [arm][prior state][to_good, to_bad].
 */
class TransitionCounts {
public:
    TransitionCounts() = default;
    explicit TransitionCounts(std::size_t arms) : cells_(arms * 4, 0) {}
    /// Rebuilds a table from its flat snapshot; size must be a multiple of 4.
    static TransitionCounts from_flat(std::vector<std::uint64_t> flat);

    void record(std::size_t arm, int s_prev, int s_next);

    std::uint64_t to_good(std::size_t arm, int s_prev) const { return cells_[index(arm, s_prev, 0)]; }
    std::uint64_t to_bad(std::size_t arm, int s_prev) const { return cells_[index(arm, s_prev, 1)]; }

    std::size_t arm_count() const { return cells_.size() / 4; }
    const std::vector<std::uint64_t>& flat() const { return cells_; }
    std::uint64_t total() const;

    TransitionCounts& operator+=(const TransitionCounts& other);
    friend bool operator==(const TransitionCounts&, const TransitionCounts&) = default;

private:
    static std::size_t index(std::size_t arm, int s_prev, int outcome) {
        return arm * 4 + static_cast<std::size_t>(s_prev) * 2 + static_cast<std::size_t>(outcome);
    }
    std::vector<std::uint64_t> cells_;
};

struct BetaPrior {
    double alpha = 1.0;
    double beta = 1.0;
};

/// Beta(alpha, beta) per (arm, prior state); prior state 0 models theta01, 1 models theta11.
struct BetaPosterior {
    struct Cell {
        double alpha = 1.0;
        double beta = 1.0;
        friend bool operator==(const Cell&, const Cell&) = default;
    };
    std::vector<std::array<Cell, 2>> arms;

    friend bool operator==(const BetaPosterior&, const BetaPosterior&) = default;
};

/// Server-side merge: alpha = alpha0 + sum_m w_m to_good_m, beta likewise.
/// Empty weights means w_m = 1 for all agents.
BetaPosterior aggregate(std::span<const TransitionCounts> per_agent, std::span<const double> weights,
                        BetaPrior prior);

/// One Thompson draw per arm, clamped to [eps, 1 - eps].
std::vector<GilbertElliotDynamics> sample_dynamics(const BetaPosterior& posterior, Rng& rng,
                                                   double eps = kDynamicsEps);

std::vector<GilbertElliotDynamics> posterior_mean(const BetaPosterior& posterior);

enum class LogBase { Two, Natural };

struct UcbOptions {
    LogBase log_base = LogBase::Two;
    bool clamp = true;
    double eps = kDynamicsEps;
};

/**
 * Optimistic dynamics: point + sqrt(log(|A||S| l) / pulls) per parameter,
 * |A||S| = 4. An arm with zero pulls gets 1 - eps.
 */
std::vector<GilbertElliotDynamics> ucb_dynamics(std::span<const GilbertElliotDynamics> point,
                                                std::span<const std::uint64_t> pulls,
                                                std::uint64_t episode, UcbOptions opts = {});

}  // namespace fedrmab
