#include "fedrmab/env.hpp"

#include <string>

#include "fedrmab/belief.hpp"
#include "fedrmab/error.hpp"

namespace fedrmab {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

bool GilbertElliotDynamics::valid() const { return in_unit(theta01) && in_unit(theta11); }

void ArmConfig::validate() const {
    if (!dynamics.valid())
        throw InvalidArgument("transition probabilities must lie in [0,1]");
    if (!in_unit(rate)) throw InvalidArgument("arm rate must lie in [0,1], got " + std::to_string(rate));
}

Environment::Environment(std::vector<ArmConfig> arms, std::size_t k, std::uint64_t seed,
                         InitialStateRule init)
    : arms_(std::move(arms)), k_(k) {
    if (arms_.empty()) throw InvalidArgument("environment needs at least one arm");
    for (const auto& a : arms_) a.validate();
    if (k_ == 0 || k_ > arms_.size())
        throw InvalidArgument("selection size K must be in [1, N]");

    streams_.reserve(arms_.size());
    for (std::size_t n = 0; n < arms_.size(); ++n) streams_.emplace_back(derive_seed(seed, n));

    if (const auto* fixed = std::get_if<FixedStart>(&init)) {
        if (fixed->states.size() != arms_.size())
            throw InvalidArgument("fixed initial states must have one entry per arm");
        for (int s : fixed->states)
            if (s != 0 && s != 1) throw InvalidArgument("arm states are 0 or 1");
        states_ = fixed->states;
    } else {
        states_.resize(arms_.size());
        for (std::size_t n = 0; n < arms_.size(); ++n) {
            const double b0 = stationary_belief(arms_[n].dynamics);
            states_[n] = streams_[n].bernoulli(b0) ? 1 : 0;
        }
    }
}

std::vector<Observation> Environment::step(std::span<const std::size_t> selected) {
    if (selected.size() != k_)
        throw InvalidArgument("expected " + std::to_string(k_) + " selected arms, got " +
                              std::to_string(selected.size()));
    std::vector<Observation> out;
    out.reserve(selected.size());
    for (std::size_t i = 0; i < selected.size(); ++i) {
        const std::size_t n = selected[i];
        if (n >= arms_.size()) throw InvalidArgument("arm index out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (selected[j] == n) throw InvalidArgument("duplicate arm in selection");
        const int s = states_[n];
        out.push_back({n, s, s == 1 ? arms_[n].rate : 0.0});
    }
    for (std::size_t n = 0; n < arms_.size(); ++n)
        states_[n] = streams_[n].bernoulli(arms_[n].dynamics.row(states_[n])) ? 1 : 0;
    ++t_;
    return out;
}

}  // namespace fedrmab
