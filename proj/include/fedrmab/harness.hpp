#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedrmab/config.hpp"
#include "fedrmab/fedtswi.hpp"

namespace fedrmab {

/// regret(t) = t * rho_ref - sum_{tau <= t} reward(tau), t counted from 1.
std::vector<double> compute_regret(std::span<const double> rewards, double rho_ref);

/// Per arm: ((d01)^2 + (d11)^2) / 2.
std::vector<double> compute_mse(std::span<const GilbertElliotDynamics> estimate,
                                std::span<const GilbertElliotDynamics> truth);

struct OptimalValue {
    double value = 0.0;
    std::vector<std::size_t> first_action;
};

/**
 * Exact finite-horizon optimum by expectimax over the belief tree: every
 * K-subset at every node, every observation outcome of the chosen arms.
 * Guarded to N <= 3, K < N, horizon <= 6.
 */
OptimalValue brute_force_optimal(std::span<const ArmConfig> arms, std::size_t k, int horizon,
                                 std::span<const Belief> initial);

/// Exact expected total reward of an index policy (WI or myopic, known dynamics) on the same tree.
double evaluate_index_policy(std::span<const ArmConfig> arms, std::size_t k, int horizon,
                             std::span<const Belief> initial, PolicyKind kind);

/// Per-episode statistics over trials.
struct AggregatedRecord {
    std::uint64_t episode = 0;
    std::size_t trials = 0;
    double t_end = 0.0;
    double reward_mean = 0.0;
    std::optional<double> reward_ci;  ///< 95% normal half-width; absent for a single trial
    double cum_reward = 0.0;
    double regret = 0.0;
    std::vector<double> mse;
    double episode_len = 0.0;
    EndReason end_reason = EndReason::Budget;  ///< most frequent across trials
};

struct MonteCarloResult {
    std::string label;
    double rho_ref = 0.0;
    std::vector<AggregatedRecord> rows;
    std::vector<std::vector<MetricsRecord>> trials;  ///< raw records, indexed by trial
};

/// rho_ref from the config, or the per-slot reward of a long known-dynamics WI run.
double resolve_reference(const ExperimentConfig& config);

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

/// Independent trials (fanned out over config.threads workers) reduced in trial order.
MonteCarloResult run_monte_carlo(const ExperimentConfig& config, std::string label = {});

/// Folds per-trial records into per-episode means and half-widths.
std::vector<AggregatedRecord> aggregate_trials(const std::vector<std::vector<MetricsRecord>>& trials);

/// 1.96 * sample sd / sqrt(n); nullopt for n < 2.
std::optional<double> half_width(std::span<const double> xs);

/// policy, episode, t_end, reward_mean, reward_ci, cum_reward, regret, mse_arm0..N-1, episode_len, end_reason
std::string csv_header(std::size_t arms);
std::string to_csv(std::span<const MonteCarloResult> results);

/// Shortest round-trip decimal for a double.
std::string format_double(double v);

}  // namespace fedrmab
