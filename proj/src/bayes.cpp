#include "fedrmab/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedrmab/error.hpp"

namespace fedrmab {

TransitionCounts TransitionCounts::from_flat(std::vector<std::uint64_t> flat) {
    if (flat.size() % 4 != 0) throw InvalidArgument("count snapshot length must be a multiple of 4");
    TransitionCounts c;
    c.cells_ = std::move(flat);
    return c;
}

void TransitionCounts::record(std::size_t arm, int s_prev, int s_next) {
    if (arm >= arm_count()) throw InvalidArgument("arm index out of range");
    ++cells_[index(arm, s_prev, s_next == 1 ? 0 : 1)];
}

std::uint64_t TransitionCounts::total() const {
    return std::accumulate(cells_.begin(), cells_.end(), std::uint64_t{0});
}

TransitionCounts& TransitionCounts::operator+=(const TransitionCounts& other) {
    if (other.cells_.size() != cells_.size()) throw InvalidArgument("count table shape mismatch");
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
    return *this;
}

BetaPosterior aggregate(std::span<const TransitionCounts> per_agent, std::span<const double> weights,
                        BetaPrior prior) {
    if (per_agent.empty()) throw InvalidArgument("aggregation needs at least one agent");
    if (!weights.empty()) {
        if (weights.size() != per_agent.size())
            throw InvalidArgument("one weight per agent required");
        bool any_positive = false;
        for (double w : weights) {
            if (!(w >= 0.0)) throw InvalidArgument("agent weights must be nonnegative");
            any_positive = any_positive || w > 0.0;
        }
        if (!any_positive) throw InvalidArgument("at least one agent weight must be positive");
    }
    const std::size_t arms = per_agent.front().arm_count();
    for (const auto& c : per_agent)
        if (c.arm_count() != arms) throw InvalidArgument("count table shape mismatch");

    BetaPosterior post;
    post.arms.resize(arms);
    for (std::size_t n = 0; n < arms; ++n) {
        for (int s = 0; s < 2; ++s) {
            // Sum the evidence before adding the prior so that unit weights give
            // bit-identical results to pooling the raw counts.
            double a = 0.0, b = 0.0;
            for (std::size_t m = 0; m < per_agent.size(); ++m) {
                const double w = weights.empty() ? 1.0 : weights[m];
                a += w * static_cast<double>(per_agent[m].to_good(n, s));
                b += w * static_cast<double>(per_agent[m].to_bad(n, s));
            }
            post.arms[n][s] = {prior.alpha + a, prior.beta + b};
        }
    }
    return post;
}

std::vector<GilbertElliotDynamics> sample_dynamics(const BetaPosterior& posterior, Rng& rng, double eps) {
    std::vector<GilbertElliotDynamics> out;
    out.reserve(posterior.arms.size());
    for (const auto& cells : posterior.arms) {
        const double t01 = rng.beta(cells[0].alpha, cells[0].beta);
        const double t11 = rng.beta(cells[1].alpha, cells[1].beta);
        out.push_back({std::clamp(t01, eps, 1.0 - eps), std::clamp(t11, eps, 1.0 - eps)});
    }
    return out;
}

std::vector<GilbertElliotDynamics> posterior_mean(const BetaPosterior& posterior) {
    std::vector<GilbertElliotDynamics> out;
    out.reserve(posterior.arms.size());
    for (const auto& cells : posterior.arms) {
        out.push_back({cells[0].alpha / (cells[0].alpha + cells[0].beta),
                       cells[1].alpha / (cells[1].alpha + cells[1].beta)});
    }
    return out;
}

std::vector<GilbertElliotDynamics> ucb_dynamics(std::span<const GilbertElliotDynamics> point,
                                                std::span<const std::uint64_t> pulls,
                                                std::uint64_t episode, UcbOptions opts) {
    if (episode < 1) throw InvalidArgument("episode index starts at 1");
    if (pulls.size() != point.size()) throw InvalidArgument("one pull count per arm required");
    const double x = 4.0 * static_cast<double>(episode);
    const double log_term = opts.log_base == LogBase::Two ? std::log2(x) : std::log(x);
    const double cap = 1.0 - opts.eps;

    auto inflate = [&](double theta, std::uint64_t n) {
        if (n == 0) return cap;
        double v = theta + std::sqrt(log_term / static_cast<double>(n));
        if (opts.clamp) v = std::clamp(v, opts.eps, cap);
        return v;
    };
    std::vector<GilbertElliotDynamics> out;
    out.reserve(point.size());
    for (std::size_t n = 0; n < point.size(); ++n)
        out.push_back({inflate(point[n].theta01, pulls[n]), inflate(point[n].theta11, pulls[n])});
    return out;
}

}  // namespace fedrmab
