#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedrmab/bayes.hpp"
#include "fedrmab/env.hpp"
#include "fedrmab/policy.hpp"

namespace fedrmab {

inline constexpr std::uint64_t kDefaultReferenceSlots = 100'000;

/**
 * Declarative description of one experiment. Read from a JSON document:
 *
 *   {
 *     "arms": [{"theta01": 0.2, "theta11": 0.8, "rate": 0.4}, ...],
 *     "agents": 4, "k": 2, "episodes": 50, "horizon": 0,
 *     "policy": "fedtswi", "known_dynamics": false,
 *     "prior": {"alpha": 1, "beta": 1}, "weights": [],
 *     "ucb": {"log": "log2", "clamp": true},
 *     "seed": 1, "trials": 100, "threads": 1,
 *     "rho_ref": null, "rho_ref_slots": 100000
 *   }
 *
 * Every key except "arms" is optional.
 */
struct ExperimentConfig {
    std::vector<ArmConfig> arms;
    std::size_t agents = 1;
    std::size_t k = 1;
    std::uint64_t episodes = 50;
    std::uint64_t horizon = 0;  ///< total slot cap per agent; 0 = unbounded
    PolicyKind policy = PolicyKind::FedTSWI;
    /// Replace the posterior by a point mass at the true dynamics.
    bool known_dynamics = false;
    BetaPrior prior;
    std::vector<double> weights;  ///< empty: every agent weighs 1
    UcbOptions ucb;
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    std::size_t threads = 1;
    std::optional<double> rho_ref;
    std::uint64_t rho_ref_slots = kDefaultReferenceSlots;

    /// Throws ConfigError describing the first violated rule.
    void validate() const;

    std::vector<double> rates() const;
    std::vector<GilbertElliotDynamics> true_dynamics() const;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
    std::string to_json_text() const;

    /// Identifies the experiment definition; seed, trials and threads are excluded.
    std::uint64_t hash() const;
};

/// The four-arm instance used throughout the experiments (M = 4, K = 2).
ExperimentConfig builtin_instance();

}  // namespace fedrmab
