#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fedrmab/belief.hpp"
#include "fedrmab/env.hpp"
#include "fedrmab/rng.hpp"

namespace fedrmab {

enum class PolicyKind {
    FedTSWI,
    WiKnown,
    MyopicKnown,
    FedTSMyopic,
    FedUcbWi,
    FedUcbMyopic,
    Random,
    Fixed,
};

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

/// Ranks arms by Whittle index (otherwise by b * rate, or not at all).
bool ranks_by_whittle(PolicyKind kind);
/// Learns dynamics from aggregated counts (Thompson or UCB).
bool learns_dynamics(PolicyKind kind);
bool uses_ucb(PolicyKind kind);

/**
 * What the server broadcasts for one episode: the kind plus the per-arm
 * dynamics the agents should plan with. For fixed selection the chosen arms
 * are precomputed once from the stationary beliefs.
 */
struct Policy {
    PolicyKind kind = PolicyKind::FedTSWI;
    std::vector<GilbertElliotDynamics> dynamics;
    std::vector<std::size_t> fixed_arms;
};

/// Top-K arm choice; ties go to the lowest arm index. Only Random consumes `rng`.
std::vector<std::size_t> select_arms(const Policy& policy, std::span<const Belief> beliefs,
                                     std::span<const double> rates, std::size_t k, Rng& rng);

/// Top-K arms by b0 * rate under the given dynamics.
std::vector<std::size_t> fixed_selection(std::span<const GilbertElliotDynamics> dynamics,
                                         std::span<const double> rates, std::size_t k);

}  // namespace fedrmab
