#include "fedrmab/fedtswi.hpp"

#include <algorithm>
#include <limits>

#include "fedrmab/error.hpp"

namespace fedrmab {

std::string_view to_string(EndReason r) {
    switch (r) {
    case EndReason::Budget: return "budget";
    case EndReason::Count: return "count";
    case EndReason::Horizon: return "horizon";
    }
    return "budget";
}

std::optional<EndReason> parse_end_reason(std::string_view s) {
    if (s == "budget") return EndReason::Budget;
    if (s == "count") return EndReason::Count;
    if (s == "horizon") return EndReason::Horizon;
    return std::nullopt;
}

AgentState::AgentState(std::vector<ArmConfig> arms, std::size_t k, std::uint64_t seed)
    : env_(std::move(arms), k, derive_seed(seed, "env")),
      counts_(env_.arm_count()),
      last_state_(env_.arm_count(), -1),
      pulls_(env_.arm_count(), 0),
      policy_rng_(derive_seed(seed, "policy")) {
    rates_.reserve(env_.arm_count());
    for (const auto& a : env_.arms()) rates_.push_back(a.rate);
}

AgentState::SlotOutcome AgentState::run_slot(const Policy& policy) {
    const std::size_t n_arms = env_.arm_count();
    auto dyn = [&](std::size_t n) -> const GilbertElliotDynamics& {
        return policy.dynamics.empty() ? env_.arms()[n].dynamics : policy.dynamics[n];
    };
    if (beliefs_.empty()) {
        beliefs_.resize(n_arms);
        for (std::size_t n = 0; n < n_arms; ++n) beliefs_[n] = stationary_belief(dyn(n));
    }

    SlotOutcome out;
    out.selected = select_arms(policy, beliefs_, rates_, env_.k(), policy_rng_);
    out.observations = env_.step(out.selected);

    std::vector<int> observed(n_arms, -1);
    for (const auto& ob : out.observations) {
        out.reward += ob.reward;
        ++pulls_[ob.arm];
        if (last_state_[ob.arm] >= 0) counts_.record(ob.arm, last_state_[ob.arm], ob.state);
        observed[ob.arm] = ob.state;
    }
    for (std::size_t n = 0; n < n_arms; ++n) {
        beliefs_[n] = observed[n] >= 0 ? update_observed(dyn(n), observed[n]) : propagate(dyn(n), beliefs_[n]);
    }
    last_state_ = std::move(observed);
    return out;
}

bool AgentState::count_tripped(const TransitionCounts& snapshot, std::size_t agents) const {
    const auto& now = counts_.flat();
    const auto& then = snapshot.flat();
    for (std::size_t i = 0; i < now.size(); ++i) {
        std::uint64_t limit;
        if (then[i] == 0) {
            limit = 1;
        } else if (agents >= 63 || then[i] > (std::numeric_limits<std::uint64_t>::max() >> agents)) {
            limit = std::numeric_limits<std::uint64_t>::max();
        } else {
            limit = then[i] << agents;
        }
        if (now[i] > limit) return true;
    }
    return false;
}

EpisodeTrace run_lockstep_episode(std::span<AgentState> agents, const EpisodePlan& plan,
                                  std::size_t total_agents, bool record) {
    if (agents.empty()) throw InvalidArgument("episode needs at least one agent");
    const std::uint64_t budget = plan.prev_len + 1;
    const bool horizon_binds = plan.slot_limit > 0 && plan.slot_limit < budget;
    const std::uint64_t max_slots = horizon_binds ? plan.slot_limit : budget;

    std::vector<TransitionCounts> snapshot;
    snapshot.reserve(agents.size());
    for (const auto& a : agents) snapshot.push_back(a.counts());

    EpisodeTrace trace;
    std::vector<double> reward(agents.size(), 0.0);
    for (;;) {
        if (record) {
            trace.selections.emplace_back();
            trace.observations.emplace_back();
        }
        for (std::size_t m = 0; m < agents.size(); ++m) {
            auto out = agents[m].run_slot(plan.policy);
            reward[m] += out.reward;
            if (record) {
                trace.selections.back().push_back(std::move(out.selected));
                trace.observations.back().push_back(std::move(out.observations));
            }
        }
        ++trace.slots;
        bool tripped = false;
        for (std::size_t m = 0; m < agents.size() && !tripped; ++m)
            tripped = agents[m].count_tripped(snapshot[m], total_agents);
        if (tripped) {
            trace.reason = EndReason::Count;
            break;
        }
        if (trace.slots >= max_slots) {
            trace.reason = horizon_binds ? EndReason::Horizon : EndReason::Budget;
            break;
        }
    }

    trace.reports.reserve(agents.size());
    for (std::size_t m = 0; m < agents.size(); ++m) {
        trace.reports.push_back({m, plan.episode, agents[m].counts(), agents[m].pulls(), trace.slots,
                                 reward[m], trace.reason});
    }
    return trace;
}

EpisodeTrace run_agent_episode(AgentState& agent, const EpisodePlan& plan, std::size_t total_agents,
                               std::size_t agent_id, bool record) {
    EpisodeTrace trace = run_lockstep_episode(std::span<AgentState>(&agent, 1), plan, total_agents, record);
    trace.reports.front().agent = agent_id;
    return trace;
}

ServerRound server_round(std::span<const TransitionCounts> per_agent, BetaPrior prior,
                         std::span<const double> weights, Rng& rng) {
    ServerRound round;
    round.posterior = aggregate(per_agent, weights, prior);
    round.sampled = sample_dynamics(round.posterior, rng);
    return round;
}

std::uint64_t agent_seed(std::uint64_t trial_seed, std::size_t agent) {
    return derive_seed(trial_seed, static_cast<std::uint64_t>(agent));
}

Coordinator::Coordinator(const ExperimentConfig& config, std::uint64_t trial_seed, double rho_ref)
    : cfg_(config),
      truth_(config.true_dynamics()),
      rho_ref_(rho_ref),
      rng_(derive_seed(trial_seed, "server")) {
    cfg_.validate();
    counts_.assign(cfg_.agents, TransitionCounts(cfg_.arms.size()));
    pulls_.assign(cfg_.agents, std::vector<std::uint64_t>(cfg_.arms.size(), 0));
    if (cfg_.policy == PolicyKind::Fixed) fixed_arms_ = fixed_selection(truth_, cfg_.rates(), cfg_.k);
}

bool Coordinator::done() const { return horizon_hit_ || episode_ >= cfg_.episodes; }

std::vector<GilbertElliotDynamics> Coordinator::current_dynamics() {
    if (!learns_dynamics(cfg_.policy) || cfg_.known_dynamics) return truth_;
    if (uses_ucb(cfg_.policy)) {
        const BetaPosterior post = aggregate(counts_, cfg_.weights, cfg_.prior);
        std::vector<std::uint64_t> pulls(cfg_.arms.size(), 0);
        for (const auto& p : pulls_)
            for (std::size_t n = 0; n < pulls.size(); ++n) pulls[n] += p[n];
        return ucb_dynamics(posterior_mean(post), pulls, episode_, cfg_.ucb);
    }
    return server_round(counts_, cfg_.prior, cfg_.weights, rng_).sampled;
}

EpisodePlan Coordinator::plan_episode() {
    if (done()) throw InvalidArgument("experiment already finished");
    if (planned_) throw InvalidArgument("previous episode has not been reported");
    ++episode_;
    EpisodePlan plan;
    plan.episode = episode_;
    plan.policy = {cfg_.policy, current_dynamics(), fixed_arms_};
    plan.prev_len = prev_len_;
    plan.slot_limit = cfg_.horizon > 0 ? cfg_.horizon - t_ : 0;
    planned_ = true;
    return plan;
}

const MetricsRecord& Coordinator::finish_episode(std::span<const AgentReport> reports) {
    if (!planned_) throw InvalidArgument("no episode in progress");
    if (reports.size() != cfg_.agents)
        throw InvalidArgument("expected " + std::to_string(cfg_.agents) + " agent reports, got " +
                              std::to_string(reports.size()));
    std::vector<const AgentReport*> by_agent(cfg_.agents, nullptr);
    for (const auto& r : reports) {
        if (r.agent >= cfg_.agents || by_agent[r.agent])
            throw InvalidArgument("missing or duplicate agent report");
        if (r.episode != episode_) throw InvalidArgument("report for the wrong episode");
        if (r.counts.arm_count() != cfg_.arms.size() || r.pulls.size() != cfg_.arms.size())
            throw InvalidArgument("report has the wrong number of arms");
        by_agent[r.agent] = &r;
    }

    double reward = 0.0;
    std::uint64_t slots = 0, longest = 0, shortest = std::numeric_limits<std::uint64_t>::max();
    bool any_count = false, any_horizon = false;
    for (std::size_t m = 0; m < cfg_.agents; ++m) {
        const AgentReport& r = *by_agent[m];
        counts_[m] = r.counts;
        pulls_[m] = r.pulls;
        reward += r.reward;
        slots += r.slots;
        longest = std::max(longest, r.slots);
        shortest = std::min(shortest, r.slots);
        any_count = any_count || r.reason == EndReason::Count;
        any_horizon = any_horizon || r.reason == EndReason::Horizon;
    }

    t_ += longest;
    prev_len_ = std::max<std::uint64_t>(shortest, 1);
    cum_reward_ += reward / static_cast<double>(cfg_.agents);

    MetricsRecord rec;
    rec.episode = episode_;
    rec.t_end = t_;
    rec.reward_mean = slots > 0 ? reward / static_cast<double>(slots) : 0.0;
    rec.cum_reward = cum_reward_;
    rec.regret = static_cast<double>(t_) * rho_ref_ - cum_reward_;
    rec.episode_len = longest;
    rec.end_reason = any_count ? EndReason::Count : (any_horizon ? EndReason::Horizon : EndReason::Budget);
    rec.mse.assign(cfg_.arms.size(), 0.0);
    if (learns_dynamics(cfg_.policy) && !cfg_.known_dynamics) {
        const auto mean = posterior_mean(aggregate(counts_, cfg_.weights, cfg_.prior));
        for (std::size_t n = 0; n < mean.size(); ++n) {
            const double e01 = mean[n].theta01 - truth_[n].theta01;
            const double e11 = mean[n].theta11 - truth_[n].theta11;
            rec.mse[n] = 0.5 * (e01 * e01 + e11 * e11);
        }
    }
    if (cfg_.horizon > 0 && t_ >= cfg_.horizon) horizon_hit_ = true;
    planned_ = false;
    records_.push_back(std::move(rec));
    return records_.back();
}

std::vector<MetricsRecord> run_experiment(const ExperimentConfig& config, std::uint64_t trial_seed,
                                          double rho_ref) {
    Coordinator server(config, trial_seed, rho_ref);
    std::vector<AgentState> agents;
    agents.reserve(config.agents);
    for (std::size_t m = 0; m < config.agents; ++m)
        agents.emplace_back(config.arms, config.k, agent_seed(trial_seed, m));

    while (!server.done()) {
        const EpisodePlan plan = server.plan_episode();
        const EpisodeTrace trace = run_lockstep_episode(agents, plan, config.agents);
        server.finish_episode(trace.reports);
    }
    return server.records();
}

double reference_reward(const std::vector<ArmConfig>& arms, std::size_t k, std::uint64_t slots,
                        std::uint64_t seed) {
    if (slots == 0) throw InvalidArgument("reference run needs at least one slot");
    AgentState agent(arms, k, seed);
    Policy policy{PolicyKind::WiKnown, {}, {}};
    for (const auto& a : arms) policy.dynamics.push_back(a.dynamics);
    double total = 0.0;
    for (std::uint64_t t = 0; t < slots; ++t) total += agent.run_slot(policy).reward;
    return total / static_cast<double>(slots);
}

}  // namespace fedrmab
