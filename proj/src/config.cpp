#include "fedrmab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fedrmab/belief.hpp"
#include "fedrmab/error.hpp"

namespace fedrmab {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
    }
}

std::uint64_t get_count(const json& j, const char* key, std::uint64_t fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(std::string("\"") + key + "\" must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

json definition_json(const ExperimentConfig& c) {
    json arms = json::array();
    for (const auto& a : c.arms)
        arms.push_back({{"theta01", a.dynamics.theta01}, {"theta11", a.dynamics.theta11}, {"rate", a.rate}});
    json j;
    j["arms"] = arms;
    j["agents"] = c.agents;
    j["k"] = c.k;
    j["episodes"] = c.episodes;
    j["horizon"] = c.horizon;
    j["policy"] = std::string(to_string(c.policy));
    j["known_dynamics"] = c.known_dynamics;
    j["prior"] = {{"alpha", c.prior.alpha}, {"beta", c.prior.beta}};
    j["weights"] = c.weights;
    j["ucb"] = {{"log", c.ucb.log_base == LogBase::Two ? "log2" : "ln"}, {"clamp", c.ucb.clamp}};
    j["rho_ref"] = c.rho_ref ? json(*c.rho_ref) : json(nullptr);
    j["rho_ref_slots"] = c.rho_ref_slots;
    return j;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (arms.empty()) throw ConfigError("at least one arm is required");
    for (std::size_t n = 0; n < arms.size(); ++n) {
        try {
            arms[n].validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError("arm " + std::to_string(n) + ": " + e.what());
        }
        if (arms[n].dynamics.degenerate())
            throw ConfigError("arm " + std::to_string(n) + ": absorbing dynamics (0, 1) are not supported");
    }
    if (agents < 1) throw ConfigError("agents must be at least 1");
    if (k < 1 || k > arms.size()) throw ConfigError("k must satisfy 1 <= k <= number of arms");
    if (episodes < 1) throw ConfigError("episodes must be at least 1");
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (!(prior.alpha > 0.0) || !(prior.beta > 0.0)) throw ConfigError("prior parameters must be positive");
    if (!weights.empty()) {
        if (weights.size() != agents) throw ConfigError("weights needs one entry per agent");
        bool positive = false;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("weights must be finite and nonnegative");
            positive = positive || w > 0.0;
        }
        if (!positive) throw ConfigError("at least one weight must be positive");
    }
    if (rho_ref && !(*rho_ref >= 0.0)) throw ConfigError("rho_ref must be nonnegative");
    if (!rho_ref && rho_ref_slots == 0) throw ConfigError("rho_ref_slots must be positive");
}

std::vector<double> ExperimentConfig::rates() const {
    std::vector<double> r;
    r.reserve(arms.size());
    for (const auto& a : arms) r.push_back(a.rate);
    return r;
}

std::vector<GilbertElliotDynamics> ExperimentConfig::true_dynamics() const {
    std::vector<GilbertElliotDynamics> d;
    d.reserve(arms.size());
    for (const auto& a : arms) d.push_back(a.dynamics);
    return d;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("arms") || !j["arms"].is_array()) throw ConfigError("config needs an \"arms\" array");

    ExperimentConfig c;
    for (const auto& a : j["arms"]) {
        if (!a.is_object()) throw ConfigError("each arm must be an object");
        ArmConfig arm;
        arm.dynamics.theta01 = get_or<double>(a, "theta01", NAN);
        arm.dynamics.theta11 = get_or<double>(a, "theta11", NAN);
        arm.rate = get_or<double>(a, "rate", 1.0);
        if (std::isnan(arm.dynamics.theta01) || std::isnan(arm.dynamics.theta11))
            throw ConfigError("each arm needs theta01 and theta11");
        c.arms.push_back(arm);
    }
    c.agents = get_count(j, "agents", c.agents);
    c.k = get_count(j, "k", c.k);
    c.episodes = get_count(j, "episodes", c.episodes);
    c.horizon = get_count(j, "horizon", c.horizon);
    const auto policy = get_or<std::string>(j, "policy", "fedtswi");
    if (auto kind = parse_policy_kind(policy)) c.policy = *kind;
    else throw ConfigError("unknown policy \"" + policy + "\"");
    c.known_dynamics = get_or<bool>(j, "known_dynamics", false);
    if (j.contains("prior")) {
        c.prior.alpha = get_or<double>(j["prior"], "alpha", 1.0);
        c.prior.beta = get_or<double>(j["prior"], "beta", 1.0);
    }
    c.weights = get_or<std::vector<double>>(j, "weights", {});
    if (j.contains("ucb")) {
        const auto base = get_or<std::string>(j["ucb"], "log", "log2");
        if (base == "log2") c.ucb.log_base = LogBase::Two;
        else if (base == "ln") c.ucb.log_base = LogBase::Natural;
        else throw ConfigError("ucb.log must be \"log2\" or \"ln\"");
        c.ucb.clamp = get_or<bool>(j["ucb"], "clamp", true);
    }
    c.seed = get_count(j, "seed", c.seed);
    c.trials = get_count(j, "trials", c.trials);
    c.threads = get_count(j, "threads", c.threads);
    if (j.contains("rho_ref") && !j["rho_ref"].is_null()) c.rho_ref = get_or<double>(j, "rho_ref", 0.0);
    c.rho_ref_slots = get_count(j, "rho_ref_slots", c.rho_ref_slots);
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
    json j = definition_json(*this);
    j["seed"] = seed;
    j["trials"] = trials;
    j["threads"] = threads;
    return j.dump(2);
}

std::uint64_t ExperimentConfig::hash() const {
    const std::string canon = definition_json(*this).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

ExperimentConfig builtin_instance() {
    ExperimentConfig c;
    c.arms = {
        {{0.20, 0.80}, 0.4},
        {{0.89, 0.17}, 0.9},
        {{0.10, 0.90}, 0.7},
        {{0.90, 0.16}, 0.6},
    };
    c.agents = 4;
    c.k = 2;
    c.episodes = 50;
    return c;
}

}  // namespace fedrmab
