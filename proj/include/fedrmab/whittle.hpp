#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fedrmab/belief.hpp"

namespace fedrmab {

/// Single-arm problem with a passivity subsidy `lambda` paid on every passive slot.
struct SubsidyProblem {
    GilbertElliotDynamics dyn;
    double rate = 1.0;
    double lambda = 0.0;
};

/**
 * Finite set of beliefs reachable by one arm, with deterministic passive
 * successors. Trajectories start at theta01, theta11 and any extra starting
 * beliefs; each is truncated once it is within 1e-9 of the stationary belief
 * (or after 512 steps) and then feeds a shared sink node holding b0.
 */
struct BeliefChain {
    std::vector<Belief> nodes;
    std::vector<std::size_t> passive_next;
    std::size_t node01 = 0;    ///< node holding theta01
    std::size_t node11 = 0;    ///< node holding theta11
    std::size_t sink = 0;      ///< b0, its own passive successor
    std::vector<std::size_t> starts;  ///< first node of each extra trajectory
    std::uint32_t truncation = 0;     ///< longest trajectory length J

    static BeliefChain build(const GilbertElliotDynamics& dyn,
                             std::span<const Belief> extra_starts = {},
                             double eps = 1e-9, std::uint32_t max_len = 512);
};

struct SingleArmSolution {
    std::vector<double> value;   ///< relative values, value[sink] == 0
    std::vector<double> gap;     ///< Q(active) - Q(passive) per node
    std::vector<bool> active;    ///< gap >= 0 (ties go to active)
    double gain = 0.0;           ///< optimal average reward per slot
    std::size_t iterations = 0;
    /// b* with active set == {b > b*}; +inf when all passive, -inf when all active,
    /// nullopt when the active set is not an upper interval.
    std::optional<double> threshold;
};

struct SolverOptions {
    double tol = 1e-10;
    std::size_t max_iter = 1'000'000;
};

/**
 * Average-reward relative value iteration on the belief chain.
 * Throws ConvergenceError (carrying the last span residual) after max_iter.
 */
SingleArmSolution solve_subsidy(const SubsidyProblem& problem, const BeliefChain& chain,
                                SolverOptions opts = {},
                                const std::vector<double>* warm_start = nullptr);

/// Closed-form Whittle index of a two-state arm at belief b, in [0, rate].
double whittle_closed(const GilbertElliotDynamics& dyn, double rate, Belief b);

/// Whittle index by bisection on the subsidy; |result - index| <= tol.
double whittle_numeric(const GilbertElliotDynamics& dyn, double rate, Belief b, double tol = 1e-4);

struct IndexabilityReport {
    bool indexable = true;
    /// passive[i][node] for lambda_grid[i]; nodes as in `chain`.
    std::vector<std::vector<bool>> passive;
    BeliefChain chain;
};

/// Checks that the passive set grows by inclusion along an ascending subsidy grid.
IndexabilityReport verify_indexability(const GilbertElliotDynamics& dyn, double rate,
                                       std::span<const double> lambda_grid);

}  // namespace fedrmab
