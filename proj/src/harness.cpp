#include "fedrmab/harness.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>

#include "fedrmab/error.hpp"
#include "fedrmab/whittle.hpp"

namespace fedrmab {

std::vector<double> compute_regret(std::span<const double> rewards, double rho_ref) {
    if (!(rho_ref >= 0.0)) throw InvalidArgument("reference reward must be nonnegative");
    std::vector<double> out(rewards.size());
    double cum = 0.0;
    for (std::size_t t = 0; t < rewards.size(); ++t) {
        cum += rewards[t];
        out[t] = static_cast<double>(t + 1) * rho_ref - cum;
    }
    return out;
}

std::vector<double> compute_mse(std::span<const GilbertElliotDynamics> estimate,
                                std::span<const GilbertElliotDynamics> truth) {
    if (estimate.size() != truth.size()) throw InvalidArgument("estimate and truth differ in arm count");
    std::vector<double> out(truth.size());
    for (std::size_t n = 0; n < truth.size(); ++n) {
        const double a = estimate[n].theta01 - truth[n].theta01;
        const double b = estimate[n].theta11 - truth[n].theta11;
        out[n] = 0.5 * (a * a + b * b);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Belief-tree evaluation
// ---------------------------------------------------------------------------

namespace {

void check_tree_guard(std::span<const ArmConfig> arms, std::size_t k, int horizon,
                      std::span<const Belief> initial) {
    if (arms.empty() || arms.size() > 3) throw InvalidArgument("tree search supports 1 to 3 arms");
    if (k < 1 || k >= arms.size()) throw InvalidArgument("tree search needs 1 <= K < N");
    if (horizon < 1 || horizon > 6) throw InvalidArgument("tree search horizon must be in [1, 6]");
    if (initial.size() != arms.size()) throw InvalidArgument("one initial belief per arm required");
}

std::vector<std::vector<std::size_t>> k_subsets(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(i);
        out.push_back(std::move(s));
    }
    return out;
}

// Expected immediate reward plus expected continuation for one action.
double action_value(std::span<const ArmConfig> arms, const std::vector<std::size_t>& action,
                    const std::vector<Belief>& b, int remaining,
                    const std::function<double(const std::vector<Belief>&, int)>& next_value) {
    double immediate = 0.0;
    for (std::size_t n : action) immediate += b[n] * arms[n].rate;
    if (remaining == 1) return immediate;

    std::vector<Belief> passive(b.size());
    for (std::size_t n = 0; n < b.size(); ++n) passive[n] = propagate(arms[n].dynamics, b[n]);

    double cont = 0.0;
    const unsigned outcomes = 1u << action.size();
    for (unsigned o = 0; o < outcomes; ++o) {
        double p = 1.0;
        std::vector<Belief> nb = passive;
        for (std::size_t i = 0; i < action.size(); ++i) {
            const std::size_t n = action[i];
            const int s = (o >> i) & 1u;
            p *= s ? b[n] : 1.0 - b[n];
            nb[n] = update_observed(arms[n].dynamics, s);
        }
        if (p > 0.0) cont += p * next_value(nb, remaining - 1);
    }
    return immediate + cont;
}

}  // namespace

OptimalValue brute_force_optimal(std::span<const ArmConfig> arms, std::size_t k, int horizon,
                                 std::span<const Belief> initial) {
    check_tree_guard(arms, k, horizon, initial);
    const auto actions = k_subsets(arms.size(), k);

    std::function<double(const std::vector<Belief>&, int)> value =
        [&](const std::vector<Belief>& b, int remaining) {
            double best = -1.0;
            for (const auto& a : actions) best = std::max(best, action_value(arms, a, b, remaining, value));
            return best;
        };

    const std::vector<Belief> b0(initial.begin(), initial.end());
    OptimalValue out;
    out.value = -1.0;
    for (const auto& a : actions) {
        const double v = action_value(arms, a, b0, horizon, value);
        if (v > out.value) {
            out.value = v;
            out.first_action = a;
        }
    }
    return out;
}

double evaluate_index_policy(std::span<const ArmConfig> arms, std::size_t k, int horizon,
                             std::span<const Belief> initial, PolicyKind kind) {
    check_tree_guard(arms, k, horizon, initial);
    if (kind != PolicyKind::WiKnown && kind != PolicyKind::MyopicKnown)
        throw InvalidArgument("tree evaluation supports wi-known and myopic-known");
    Policy policy{kind, {}, {}};
    std::vector<double> rates;
    for (const auto& a : arms) {
        policy.dynamics.push_back(a.dynamics);
        rates.push_back(a.rate);
    }
    Rng unused(0);

    std::function<double(const std::vector<Belief>&, int)> value =
        [&](const std::vector<Belief>& b, int remaining) {
            const auto action = select_arms(policy, b, rates, k, unused);
            return action_value(arms, action, b, remaining, value);
        };
    return value(std::vector<Belief>(initial.begin(), initial.end()), horizon);
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

double resolve_reference(const ExperimentConfig& config) {
    if (config.rho_ref) return *config.rho_ref;
    return reference_reward(config.arms, config.k, config.rho_ref_slots, derive_seed(config.seed, "reference"));
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
    return derive_seed(derive_seed(master, "trial"), static_cast<std::uint64_t>(trial));
}

std::optional<double> half_width(std::span<const double> xs) {
    if (xs.size() < 2) return std::nullopt;
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

std::vector<AggregatedRecord> aggregate_trials(const std::vector<std::vector<MetricsRecord>>& trials) {
    std::size_t episodes = 0;
    for (const auto& t : trials) episodes = std::max(episodes, t.size());

    std::vector<AggregatedRecord> rows;
    rows.reserve(episodes);
    for (std::size_t e = 0; e < episodes; ++e) {
        AggregatedRecord row;
        row.episode = e + 1;
        std::vector<double> rewards;
        std::array<std::size_t, 3> reasons{};
        for (const auto& t : trials) {
            if (e >= t.size()) continue;
            const MetricsRecord& r = t[e];
            rewards.push_back(r.reward_mean);
            row.t_end += static_cast<double>(r.t_end);
            row.cum_reward += r.cum_reward;
            row.regret += r.regret;
            row.episode_len += static_cast<double>(r.episode_len);
            if (row.mse.empty()) row.mse.assign(r.mse.size(), 0.0);
            for (std::size_t n = 0; n < r.mse.size(); ++n) row.mse[n] += r.mse[n];
            ++reasons[static_cast<std::size_t>(r.end_reason)];
        }
        const double n = static_cast<double>(rewards.size());
        row.trials = rewards.size();
        row.reward_mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
        row.reward_ci = half_width(rewards);
        row.t_end /= n;
        row.cum_reward /= n;
        row.regret /= n;
        row.episode_len /= n;
        for (double& m : row.mse) m /= n;
        row.end_reason = static_cast<EndReason>(
            std::distance(reasons.begin(), std::max_element(reasons.begin(), reasons.end())));
        rows.push_back(std::move(row));
    }
    return rows;
}

MonteCarloResult run_monte_carlo(const ExperimentConfig& config, std::string label) {
    config.validate();
    MonteCarloResult result;
    result.label = label.empty() ? std::string(to_string(config.policy)) : std::move(label);
    result.rho_ref = resolve_reference(config);
    result.trials.resize(config.trials);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= config.trials) return;
            try {
                result.trials[i] = run_experiment(config, trial_seed(config.seed, i), result.rho_ref);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next = config.trials;
                return;
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, config.trials);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    result.rows = aggregate_trials(result.trials);
    return result;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

std::string csv_header(std::size_t arms) {
    std::string h = "policy,episode,t_end,reward_mean,reward_ci,cum_reward,regret";
    for (std::size_t n = 0; n < arms; ++n) h += ",mse_arm" + std::to_string(n);
    h += ",episode_len,end_reason\n";
    return h;
}

std::string to_csv(std::span<const MonteCarloResult> results) {
    std::size_t arms = 0;
    for (const auto& r : results)
        for (const auto& row : r.rows) arms = std::max(arms, row.mse.size());
    std::string out = csv_header(arms);
    for (const auto& r : results) {
        for (const auto& row : r.rows) {
            out += r.label;
            out += ',' + std::to_string(row.episode);
            out += ',' + format_double(row.t_end);
            out += ',' + format_double(row.reward_mean);
            out += ',' + (row.reward_ci ? format_double(*row.reward_ci) : std::string());
            out += ',' + format_double(row.cum_reward);
            out += ',' + format_double(row.regret);
            for (std::size_t n = 0; n < arms; ++n)
                out += ',' + format_double(n < row.mse.size() ? row.mse[n] : 0.0);
            out += ',' + format_double(row.episode_len);
            out += ',';
            out += to_string(row.end_reason);
            out += '\n';
        }
    }
    return out;
}

}  // namespace fedrmab
