#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fedrmab/bayes.hpp"
#include "fedrmab/belief.hpp"
#include "fedrmab/config.hpp"
#include "fedrmab/env.hpp"
#include "fedrmab/policy.hpp"
#include "fedrmab/rng.hpp"

namespace fedrmab {

enum class EndReason { Budget, Count, Horizon };

std::string_view to_string(EndReason r);
std::optional<EndReason> parse_end_reason(std::string_view s);

/// Per-agent simulation state: beliefs, gated transition counts and the private environment.
class AgentState {
public:
    AgentState(std::vector<ArmConfig> arms, std::size_t k, std::uint64_t agent_seed);

    struct SlotOutcome {
        std::vector<std::size_t> selected;
        std::vector<Observation> observations;
        double reward = 0.0;
    };

    /// Select, observe, record consecutive-selection transitions, update beliefs.
    SlotOutcome run_slot(const Policy& policy);

    const std::vector<Belief>& beliefs() const { return beliefs_; }
    const TransitionCounts& counts() const { return counts_; }
    const std::vector<std::uint64_t>& pulls() const { return pulls_; }
    const Environment& env() const { return env_; }
    std::uint64_t slot() const { return env_.slot(); }

    /// True once some cell exceeds max(1, 2^M * snapshot cell).
    bool count_tripped(const TransitionCounts& snapshot, std::size_t agents) const;

private:
    Environment env_;
    std::vector<double> rates_;
    std::vector<Belief> beliefs_;
    TransitionCounts counts_;
    std::vector<int> last_state_;  ///< observed state in the previous slot, -1 if unobserved
    std::vector<std::uint64_t> pulls_;
    Rng policy_rng_;
};

/// Server-to-agent payload for one episode.
struct EpisodePlan {
    std::uint64_t episode = 1;
    Policy policy;
    std::uint64_t prev_len = 1;    ///< T_{l-1}; the episode may run prev_len + 1 slots
    std::uint64_t slot_limit = 0;  ///< hard cap on slots this episode (horizon), 0 = none
};

/// Agent-to-server payload at the end of an episode.
struct AgentReport {
    std::size_t agent = 0;
    std::uint64_t episode = 1;
    TransitionCounts counts;  ///< cumulative
    std::vector<std::uint64_t> pulls;  ///< cumulative per arm
    std::uint64_t slots = 0;
    double reward = 0.0;       ///< summed over this episode's slots
    EndReason reason = EndReason::Budget;
};

struct EpisodeTrace {
    std::uint64_t slots = 0;
    EndReason reason = EndReason::Budget;
    /// selections[slot][agent]; filled only when recording is requested.
    std::vector<std::vector<std::vector<std::size_t>>> selections;
    std::vector<std::vector<std::vector<Observation>>> observations;
    std::vector<AgentReport> reports;
};

/**
 * Runs agents in lockstep until the episode budget is exhausted or any agent
 * trips the count-doubling rule (checked on its own local counts).
 */
EpisodeTrace run_lockstep_episode(std::span<AgentState> agents, const EpisodePlan& plan,
                                  std::size_t total_agents, bool record = false);

/// Single-agent episode: the same loop with only this agent's counts gating the stop.
EpisodeTrace run_agent_episode(AgentState& agent, const EpisodePlan& plan, std::size_t total_agents,
                               std::size_t agent_id = 0, bool record = false);

struct ServerRound {
    BetaPosterior posterior;
    std::vector<GilbertElliotDynamics> sampled;
};

/// Aggregate the agents' counts and draw one set of dynamics from the merged posterior.
ServerRound server_round(std::span<const TransitionCounts> per_agent, BetaPrior prior,
                         std::span<const double> weights, Rng& rng);

struct MetricsRecord {
    std::uint64_t episode = 0;
    std::uint64_t t_end = 0;
    double reward_mean = 0.0;  ///< per agent per slot within the episode
    double cum_reward = 0.0;   ///< per agent, since slot 0
    double regret = 0.0;
    std::vector<double> mse;   ///< per arm, posterior mean vs truth
    std::uint64_t episode_len = 0;
    EndReason end_reason = EndReason::Budget;

    friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/**
 * Server side of the algorithm, independent of transport: plans each
 * episode and folds the agents' reports into metrics.
 */
class Coordinator {
public:
    Coordinator(const ExperimentConfig& config, std::uint64_t trial_seed, double rho_ref);

    bool done() const;
    /// Aggregates the latest reports, draws or builds the policy, fixes the budget.
    EpisodePlan plan_episode();
    /// Consumes one report per agent for the planned episode.
    const MetricsRecord& finish_episode(std::span<const AgentReport> reports);

    const std::vector<MetricsRecord>& records() const { return records_; }
    std::uint64_t slots_elapsed() const { return t_; }

private:
    std::vector<GilbertElliotDynamics> current_dynamics();

    ExperimentConfig cfg_;
    std::vector<GilbertElliotDynamics> truth_;
    double rho_ref_;
    Rng rng_;
    std::vector<TransitionCounts> counts_;
    std::vector<std::vector<std::uint64_t>> pulls_;
    std::vector<std::size_t> fixed_arms_;
    std::uint64_t episode_ = 0;  ///< last planned episode
    std::uint64_t prev_len_ = 1;
    std::uint64_t t_ = 0;
    double cum_reward_ = 0.0;
    bool planned_ = false;
    bool horizon_hit_ = false;
    std::vector<MetricsRecord> records_;
};

/// Seed of agent m within a trial; shared by in-process and networked runs.
std::uint64_t agent_seed(std::uint64_t trial_seed, std::size_t agent);

/// One trial of the configured policy with M lockstep agents in-process.
std::vector<MetricsRecord> run_experiment(const ExperimentConfig& config, std::uint64_t trial_seed,
                                          double rho_ref);

/// Long-run per-slot reward of the Whittle policy with known dynamics (single agent).
double reference_reward(const std::vector<ArmConfig>& arms, std::size_t k, std::uint64_t slots,
                        std::uint64_t seed);

}  // namespace fedrmab
