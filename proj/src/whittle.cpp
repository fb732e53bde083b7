#include "fedrmab/whittle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedrmab/error.hpp"

namespace fedrmab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gaps this close to zero are numerical ties: compatible with either action
// when checking the threshold structure.
constexpr double kTieEps = 1e-9;

std::optional<double> find_threshold(const BeliefChain& chain, const std::vector<double>& gap,
                                     const std::vector<bool>& active) {
    double min_active = kInf, max_passive = -kInf;
    double min_strict_active = kInf, max_strict_passive = -kInf;
    for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
        const double b = chain.nodes[i];
        if (active[i]) min_active = std::min(min_active, b);
        else max_passive = std::max(max_passive, b);
        if (gap[i] > kTieEps) min_strict_active = std::min(min_strict_active, b);
        if (gap[i] < -kTieEps) max_strict_passive = std::max(max_strict_passive, b);
    }
    if (max_passive == -kInf) return -kInf;
    if (min_active == kInf) return kInf;
    if (max_passive < min_active) return max_passive;
    if (max_strict_passive < min_strict_active) return max_strict_passive;
    return std::nullopt;
}

}  // namespace

BeliefChain BeliefChain::build(const GilbertElliotDynamics& dyn, std::span<const Belief> extra_starts,
                               double eps, std::uint32_t max_len) {
    const double b0 = stationary_belief(dyn);
    BeliefChain chain;
    std::vector<std::size_t> tails;  // last node of each trajectory, linked to the sink below

    auto add_trajectory = [&](Belief start) {
        const std::size_t first = chain.nodes.size();
        Belief b = clamp_belief(start);
        std::uint32_t len = 0;
        for (;;) {
            chain.nodes.push_back(b);
            chain.passive_next.push_back(chain.nodes.size());  // provisional: next node
            ++len;
            if (std::abs(b - b0) < eps || len >= max_len) break;
            b = propagate(dyn, b);
        }
        tails.push_back(chain.nodes.size() - 1);
        chain.truncation = std::max(chain.truncation, len);
        return first;
    };

    chain.node01 = add_trajectory(dyn.theta01);
    chain.node11 = add_trajectory(dyn.theta11);
    for (Belief s : extra_starts) chain.starts.push_back(add_trajectory(s));

    chain.sink = chain.nodes.size();
    chain.nodes.push_back(b0);
    chain.passive_next.push_back(chain.sink);
    for (std::size_t t : tails) chain.passive_next[t] = chain.sink;
    return chain;
}

SingleArmSolution solve_subsidy(const SubsidyProblem& problem, const BeliefChain& chain,
                                SolverOptions opts, const std::vector<double>* warm_start) {
    if (!(opts.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
    if (!std::isfinite(problem.lambda)) throw InvalidArgument("subsidy must be finite");

    const std::size_t n = chain.nodes.size();
    const double rate = problem.rate;
    const double lambda = problem.lambda;
    // Aperiodicity transform h <- (1-tau) h + tau T h: same gain and optimal
    // actions, but RVI converges even when the chain under a policy is periodic.
    constexpr double tau = 0.5;

    std::vector<double> h(n, 0.0), next(n);
    if (warm_start && warm_start->size() == n) h = *warm_start;

    SingleArmSolution sol;
    double span = kInf;
    std::size_t it = 0;
    for (; it < opts.max_iter; ++it) {
        const double v01 = h[chain.node01], v11 = h[chain.node11];
        for (std::size_t i = 0; i < n; ++i) {
            const double b = chain.nodes[i];
            const double q1 = b * (rate + v11) + (1.0 - b) * v01;
            const double q0 = lambda + h[chain.passive_next[i]];
            next[i] = (1.0 - tau) * h[i] + tau * std::max(q1, q0);
        }
        double lo = kInf, hi = -kInf;
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = next[i] - h[i];
            lo = std::min(lo, diff);
            hi = std::max(hi, diff);
        }
        span = hi - lo;
        const double ref = next[chain.sink];
        for (std::size_t i = 0; i < n; ++i) h[i] = next[i] - ref;
        if (span < opts.tol) {
            // Gain of the original chain is the midpoint of the bounds scaled back by tau.
            sol.gain = 0.5 * (lo + hi) / tau;
            break;
        }
    }
    if (it == opts.max_iter)
        throw ConvergenceError("relative value iteration did not converge", span);

    sol.iterations = it + 1;
    sol.value = h;
    sol.gap.resize(n);
    sol.active.resize(n);
    const double v01 = h[chain.node01], v11 = h[chain.node11];
    for (std::size_t i = 0; i < n; ++i) {
        const double b = chain.nodes[i];
        const double q1 = b * (rate + v11) + (1.0 - b) * v01;
        const double q0 = lambda + h[chain.passive_next[i]];
        sol.gap[i] = q1 - q0;
        sol.active[i] = sol.gap[i] >= 0.0;
    }
    sol.threshold = find_threshold(chain, sol.gap, sol.active);
    return sol;
}

double whittle_closed(const GilbertElliotDynamics& dyn, double rate, Belief b) {
    const double t01 = dyn.theta01, t11 = dyn.theta11;
    b = clamp_belief(b);
    double w;
    if (t11 >= t01) {
        if (b <= t01 || b >= t11) return b * rate;
        const double b0 = stationary_belief(dyn);
        if (b < b0) {
            // Time for a passive arm reset to theta01 to climb past b.
            const double drift = b - propagate(dyn, b);
            const auto steps = crossing_time(dyn, t01, b);
            double num, den;
            if (steps) {
                const double l = *steps;
                const double reach = k_step(dyn, t01, *steps);
                num = drift * (l + 1.0) + reach;
                den = 1.0 - t11 + drift * l + reach;
            } else {
                // Beyond the cap, drift * L -> 0 and the reached belief -> b0.
                num = b0;
                den = 1.0 - t11 + b0;
            }
            w = num / den;
        } else {
            w = b / (1.0 - t11 + b);
        }
    } else {
        if (b <= t11 || b >= t01) return b * rate;
        const double b0 = stationary_belief(dyn);
        const double t_of_11 = propagate(dyn, t11);
        if (b < b0) {
            const double tb = propagate(dyn, b);
            w = (b + t01 - tb) / (1.0 + t01 - t_of_11 + tb - b);
        } else if (b < t_of_11) {
            w = t01 / (1.0 + t01 - t_of_11);
        } else {
            w = t01 / (1.0 + t01 - b);
        }
    }
    return std::clamp(w, 0.0, 1.0) * rate;
}

double whittle_numeric(const GilbertElliotDynamics& dyn, double rate, Belief b, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("index tolerance must be positive");
    const Belief start[] = {clamp_belief(b)};
    const BeliefChain chain = BeliefChain::build(dyn, start);
    const std::size_t node = chain.starts.front();

    SolverOptions opts;
    opts.tol = std::min(1e-10, tol * 1e-4);
    double lo = 0.0, hi = rate;
    std::vector<double> warm;
    for (int step = 0; step < 60 && hi - lo > tol; ++step) {
        const double mid = 0.5 * (lo + hi);
        const SingleArmSolution sol = solve_subsidy({dyn, rate, mid}, chain, opts, &warm);
        warm = sol.value;
        if (sol.gap[node] >= 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

IndexabilityReport verify_indexability(const GilbertElliotDynamics& dyn, double rate,
                                       std::span<const double> lambda_grid) {
    for (std::size_t i = 1; i < lambda_grid.size(); ++i)
        if (lambda_grid[i] < lambda_grid[i - 1])
            throw InvalidArgument("subsidy grid must be ascending");

    IndexabilityReport report;
    report.chain = BeliefChain::build(dyn);
    std::vector<double> warm;
    for (double lambda : lambda_grid) {
        const SingleArmSolution sol = solve_subsidy({dyn, rate, lambda}, report.chain, {}, &warm);
        warm = sol.value;
        std::vector<bool> passive(sol.active.size());
        for (std::size_t i = 0; i < passive.size(); ++i) passive[i] = !sol.active[i];
        if (!report.passive.empty()) {
            const auto& prev = report.passive.back();
            for (std::size_t i = 0; i < passive.size(); ++i)
                if (prev[i] && !passive[i]) report.indexable = false;
        }
        report.passive.push_back(std::move(passive));
    }
    return report;
}

}  // namespace fedrmab
