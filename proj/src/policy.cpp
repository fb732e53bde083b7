#include "fedrmab/policy.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <utility>

#include "fedrmab/error.hpp"
#include "fedrmab/whittle.hpp"

namespace fedrmab {

namespace {

constexpr std::array<std::pair<PolicyKind, std::string_view>, 8> kNames{{
    {PolicyKind::FedTSWI, "fedtswi"},
    {PolicyKind::WiKnown, "wi-known"},
    {PolicyKind::MyopicKnown, "myopic-known"},
    {PolicyKind::FedTSMyopic, "fedts-myopic"},
    {PolicyKind::FedUcbWi, "feducb-wi"},
    {PolicyKind::FedUcbMyopic, "feducb-myopic"},
    {PolicyKind::Random, "random"},
    {PolicyKind::Fixed, "fixed"},
}};

std::vector<std::size_t> top_k(std::span<const double> score, std::size_t k) {
    std::vector<std::size_t> idx(score.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    idx.resize(k);
    return idx;
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
    for (const auto& [k, name] : kNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
    for (const auto& [k, n] : kNames)
        if (n == name) return k;
    return std::nullopt;
}

bool ranks_by_whittle(PolicyKind kind) {
    return kind == PolicyKind::FedTSWI || kind == PolicyKind::WiKnown || kind == PolicyKind::FedUcbWi;
}

bool learns_dynamics(PolicyKind kind) {
    return kind == PolicyKind::FedTSWI || kind == PolicyKind::FedTSMyopic || uses_ucb(kind);
}

bool uses_ucb(PolicyKind kind) {
    return kind == PolicyKind::FedUcbWi || kind == PolicyKind::FedUcbMyopic;
}

std::vector<std::size_t> select_arms(const Policy& policy, std::span<const Belief> beliefs,
                                     std::span<const double> rates, std::size_t k, Rng& rng) {
    const std::size_t n = beliefs.size();
    if (rates.size() != n) throw InvalidArgument("one rate per arm required");
    if (k == 0 || k > n) throw InvalidArgument("selection size K must be in [1, N]");

    switch (policy.kind) {
    case PolicyKind::Random: {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }
    case PolicyKind::Fixed:
        if (policy.fixed_arms.size() != k) throw InvalidArgument("fixed policy holds the wrong number of arms");
        return policy.fixed_arms;
    default:
        break;
    }

    std::vector<double> score(n);
    if (ranks_by_whittle(policy.kind)) {
        if (policy.dynamics.size() != n) throw InvalidArgument("policy dynamics missing for some arms");
        for (std::size_t i = 0; i < n; ++i) score[i] = whittle_closed(policy.dynamics[i], rates[i], beliefs[i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) score[i] = beliefs[i] * rates[i];
    }
    return top_k(score, k);
}

std::vector<std::size_t> fixed_selection(std::span<const GilbertElliotDynamics> dynamics,
                                         std::span<const double> rates, std::size_t k) {
    std::vector<double> score(dynamics.size());
    for (std::size_t i = 0; i < dynamics.size(); ++i) score[i] = stationary_belief(dynamics[i]) * rates[i];
    return top_k(score, k);
}

}  // namespace fedrmab
