#include "fedrmab/fedrmab.h"

#include <cmath>
#include <fstream>
#include <new>
#include <string>
#include <string_view>
#include <vector>

#include "fedrmab/config.hpp"
#include "fedrmab/error.hpp"
#include "fedrmab/fednet.hpp"
#include "fedrmab/harness.hpp"
#include "fedrmab/whittle.hpp"

struct fedrmab_config {
    fedrmab::ExperimentConfig cfg;
};

struct fedrmab_result {
    std::string text;
};

namespace {

thread_local std::string last_error;

fedrmab_status fail(fedrmab_status code, std::string message) {
    last_error = std::move(message);
    return code;
}

/// Maps exceptions from the core onto status codes.
template <class F>
fedrmab_status guarded(F&& body) {
    try {
        last_error.clear();
        body();
        return FEDRMAB_OK;
    } catch (const fedrmab::ConfigError& e) {
        return fail(FEDRMAB_ERR_CONFIG, e.what());
    } catch (const fedrmab::InvalidArgument& e) {
        return fail(FEDRMAB_ERR_INVALID_ARGUMENT, e.what());
    } catch (const fedrmab::NetworkError& e) {
        return fail(FEDRMAB_ERR_NETWORK, e.what());
    } catch (const std::bad_alloc&) {
        return fail(FEDRMAB_ERR_RUNTIME, "out of memory");
    } catch (const std::exception& e) {
        return fail(FEDRMAB_ERR_RUNTIME, e.what());
    } catch (...) {
        return fail(FEDRMAB_ERR_RUNTIME, "unknown error");
    }
}

#define REQUIRE_ARG(cond)                                                         \
    do {                                                                          \
        if (!(cond)) return fail(FEDRMAB_ERR_INVALID_ARGUMENT, "null or invalid argument: " #cond); \
    } while (0)

fedrmab_status emit(std::string text, fedrmab_result** out) {
    *out = new fedrmab_result{std::move(text)};
    return FEDRMAB_OK;
}

std::uint64_t* uint_field(fedrmab::ExperimentConfig& c, std::string_view key, std::size_t*& size_field) {
    size_field = nullptr;
    if (key == "episodes") return &c.episodes;
    if (key == "horizon") return &c.horizon;
    if (key == "seed") return &c.seed;
    if (key == "rho_ref_slots") return &c.rho_ref_slots;
    if (key == "agents") size_field = &c.agents;
    else if (key == "k") size_field = &c.k;
    else if (key == "trials") size_field = &c.trials;
    else if (key == "threads") size_field = &c.threads;
    return nullptr;
}

fedrmab::GilbertElliotDynamics checked_dynamics(double t01, double t11, double rate) {
    fedrmab::ArmConfig arm{{t01, t11}, rate};
    arm.validate();
    return arm.dynamics;
}

}  // namespace

extern "C" {

const char* fedrmab_version(void) { return "0.1.0"; }

const char* fedrmab_last_error(void) { return last_error.c_str(); }

fedrmab_status fedrmab_config_from_string(const char* json_text, fedrmab_config** out) {
    REQUIRE_ARG(json_text && out);
    return guarded([&] { *out = new fedrmab_config{fedrmab::ExperimentConfig::from_json_text(json_text)}; });
}

fedrmab_status fedrmab_config_from_file(const char* path, fedrmab_config** out) {
    REQUIRE_ARG(path && out);
    {
        std::ifstream probe(path);
        if (!probe) return fail(FEDRMAB_ERR_IO, std::string("cannot open config file ") + path);
    }
    return guarded([&] { *out = new fedrmab_config{fedrmab::ExperimentConfig::from_file(path)}; });
}

fedrmab_status fedrmab_config_builtin(fedrmab_config** out) {
    REQUIRE_ARG(out);
    return guarded([&] { *out = new fedrmab_config{fedrmab::builtin_instance()}; });
}

fedrmab_status fedrmab_config_clone(const fedrmab_config* cfg, fedrmab_config** out) {
    REQUIRE_ARG(cfg && out);
    return guarded([&] { *out = new fedrmab_config{cfg->cfg}; });
}

void fedrmab_config_free(fedrmab_config* cfg) { delete cfg; }

fedrmab_status fedrmab_config_set_uint(fedrmab_config* cfg, const char* key, uint64_t value) {
    REQUIRE_ARG(cfg && key);
    std::size_t* size_field = nullptr;
    if (auto* f = uint_field(cfg->cfg, key, size_field)) *f = value;
    else if (size_field) *size_field = static_cast<std::size_t>(value);
    else return fail(FEDRMAB_ERR_INVALID_ARGUMENT, std::string("unknown integer key: ") + key);
    last_error.clear();
    return FEDRMAB_OK;
}

fedrmab_status fedrmab_config_get_uint(const fedrmab_config* cfg, const char* key, uint64_t* out) {
    REQUIRE_ARG(cfg && key && out);
    auto& c = const_cast<fedrmab::ExperimentConfig&>(cfg->cfg);
    std::size_t* size_field = nullptr;
    if (auto* f = uint_field(c, key, size_field)) *out = *f;
    else if (size_field) *out = *size_field;
    else return fail(FEDRMAB_ERR_INVALID_ARGUMENT, std::string("unknown integer key: ") + key);
    last_error.clear();
    return FEDRMAB_OK;
}

fedrmab_status fedrmab_config_set_policy(fedrmab_config* cfg, const char* name) {
    REQUIRE_ARG(cfg && name);
    auto kind = fedrmab::parse_policy_kind(name);
    if (!kind) return fail(FEDRMAB_ERR_CONFIG, std::string("unknown policy: ") + name);
    cfg->cfg.policy = *kind;
    last_error.clear();
    return FEDRMAB_OK;
}

fedrmab_status fedrmab_config_set_known_dynamics(fedrmab_config* cfg, int known) {
    REQUIRE_ARG(cfg);
    cfg->cfg.known_dynamics = known != 0;
    return FEDRMAB_OK;
}

fedrmab_status fedrmab_config_set_rho_ref(fedrmab_config* cfg, double rho_ref) {
    REQUIRE_ARG(cfg);
    if (!(std::isfinite(rho_ref) && rho_ref >= 0.0)) return fail(FEDRMAB_ERR_CONFIG, "rho_ref must be finite and >= 0");
    cfg->cfg.rho_ref = rho_ref;
    return FEDRMAB_OK;
}

fedrmab_status fedrmab_config_hash(const fedrmab_config* cfg, uint64_t* out) {
    REQUIRE_ARG(cfg && out);
    return guarded([&] { *out = cfg->cfg.hash(); });
}

fedrmab_status fedrmab_config_to_json(const fedrmab_config* cfg, fedrmab_result** out) {
    REQUIRE_ARG(cfg && out);
    return guarded([&] { emit(cfg->cfg.to_json_text(), out); });
}

fedrmab_status fedrmab_run(const fedrmab_config* cfg, fedrmab_result** out) {
    REQUIRE_ARG(cfg && out);
    return guarded([&] {
        const auto result = fedrmab::run_monte_carlo(cfg->cfg);
        emit(fedrmab::to_csv(std::span(&result, 1)), out);
    });
}

fedrmab_status fedrmab_compare(const fedrmab_config* cfg, const char* const* policies, size_t count,
                               fedrmab_result** out) {
    REQUIRE_ARG(cfg && out && (policies || count == 0));
    return guarded([&] {
        std::vector<fedrmab::PolicyKind> kinds;
        for (size_t i = 0; i < count; ++i) {
            auto kind = fedrmab::parse_policy_kind(policies[i] ? policies[i] : "");
            if (!kind) throw fedrmab::ConfigError(std::string("unknown policy: ") + (policies[i] ? policies[i] : ""));
            kinds.push_back(*kind);
        }
        if (kinds.empty()) throw fedrmab::ConfigError("compare needs at least one policy");
        std::vector<fedrmab::MonteCarloResult> results;
        for (auto kind : kinds) {
            auto c = cfg->cfg;
            c.policy = kind;
            results.push_back(fedrmab::run_monte_carlo(c));
        }
        emit(fedrmab::to_csv(results), out);
    });
}

fedrmab_status fedrmab_sweep(const fedrmab_config* cfg, const char* param, const uint64_t* values, size_t count,
                             fedrmab_result** out) {
    REQUIRE_ARG(cfg && param && out && (values || count == 0));
    const std::string_view p(param);
    if (p != "agents" && p != "k") return fail(FEDRMAB_ERR_INVALID_ARGUMENT, "sweep parameter must be agents or k");
    return guarded([&] {
        if (count == 0) throw fedrmab::ConfigError("sweep needs at least one value");
        std::vector<fedrmab::MonteCarloResult> results;
        for (size_t i = 0; i < count; ++i) {
            auto c = cfg->cfg;
            if (p == "agents") c.agents = static_cast<std::size_t>(values[i]);
            else c.k = static_cast<std::size_t>(values[i]);
            const std::string label =
                std::string(fedrmab::to_string(c.policy)) + "@" + std::string(p) + "=" + std::to_string(values[i]);
            results.push_back(fedrmab::run_monte_carlo(c, label));
        }
        emit(fedrmab::to_csv(results), out);
    });
}

fedrmab_status fedrmab_whittle_table(double theta01, double theta11, double rate, size_t grid, double tol,
                                     fedrmab_result** out) {
    REQUIRE_ARG(out);
    if (grid < 2) return fail(FEDRMAB_ERR_INVALID_ARGUMENT, "grid must have at least 2 points");
    if (!(tol > 0.0)) return fail(FEDRMAB_ERR_INVALID_ARGUMENT, "tol must be positive");
    return guarded([&] {
        const auto dyn = checked_dynamics(theta01, theta11, rate);
        std::string csv = "b,W_closed,W_numeric,abs_diff\n";
        for (size_t i = 0; i < grid; ++i) {
            const double b = static_cast<double>(i) / static_cast<double>(grid - 1);
            const double wc = fedrmab::whittle_closed(dyn, rate, b);
            const double wn = fedrmab::whittle_numeric(dyn, rate, b, tol);
            csv += fedrmab::format_double(b) + "," + fedrmab::format_double(wc) + "," + fedrmab::format_double(wn) +
                   "," + fedrmab::format_double(std::abs(wc - wn)) + "\n";
        }
        emit(std::move(csv), out);
    });
}

fedrmab_status fedrmab_whittle_closed(double theta01, double theta11, double rate, double belief, double* out) {
    REQUIRE_ARG(out);
    return guarded([&] { *out = fedrmab::whittle_closed(checked_dynamics(theta01, theta11, rate), rate, belief); });
}

fedrmab_status fedrmab_whittle_numeric(double theta01, double theta11, double rate, double belief, double tol,
                                       double* out) {
    REQUIRE_ARG(out);
    return guarded(
        [&] { *out = fedrmab::whittle_numeric(checked_dynamics(theta01, theta11, rate), rate, belief, tol); });
}

fedrmab_status fedrmab_serve(const fedrmab_config* cfg, const char* bind, int join_timeout_ms,
                             fedrmab_listening_fn on_listening, void* user, fedrmab_result** out) {
    REQUIRE_ARG(cfg && bind && out && join_timeout_ms > 0);
    return guarded([&] {
        fedrmab::ServeOptions opts;
        opts.join_timeout = std::chrono::milliseconds(join_timeout_ms);
        if (on_listening) opts.on_listening = [=](std::uint16_t port) { on_listening(port, user); };
        const auto result = fedrmab::serve(bind, cfg->cfg, opts);
        emit(fedrmab::to_csv(std::span(&result, 1)), out);
    });
}

fedrmab_status fedrmab_agent_run(const fedrmab_config* cfg, const char* server, size_t agent_id,
                                 uint64_t master_seed) {
    REQUIRE_ARG(cfg && server);
    return guarded([&] { fedrmab::agent_run(server, agent_id, master_seed, cfg->cfg); });
}

const char* fedrmab_result_text(const fedrmab_result* result) { return result ? result->text.c_str() : ""; }

size_t fedrmab_result_size(const fedrmab_result* result) { return result ? result->text.size() : 0; }

void fedrmab_result_free(fedrmab_result* result) { delete result; }

}  // extern "C"
