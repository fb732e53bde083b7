// fed-rmab: command-line front end over the C API.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedrmab/fedrmab.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int exit_code(fedrmab_status s) {
    switch (s) {
    case FEDRMAB_OK: return 0;
    case FEDRMAB_ERR_INVALID_ARGUMENT:
    case FEDRMAB_ERR_CONFIG: return kExitConfig;
    default: return kExitRuntime;
    }
}

int report(fedrmab_status s) {
    if (s != FEDRMAB_OK) std::cerr << "fed-rmab: " << fedrmab_last_error() << "\n";
    return exit_code(s);
}

/// Anything that goes wrong while loading the config is a config error, unreadable files included.
int report_config() {
    std::cerr << "fed-rmab: " << fedrmab_last_error() << "\n";
    return kExitConfig;
}

struct ConfigHandle {
    fedrmab_config* ptr = nullptr;
    ~ConfigHandle() { fedrmab_config_free(ptr); }
};

struct ResultHandle {
    fedrmab_result* ptr = nullptr;
    ~ResultHandle() { fedrmab_result_free(ptr); }
};

/// Common experiment flags; unset values keep whatever the config file says.
struct ExperimentFlags {
    std::string config;
    std::string out;
    std::string policy;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t threads = 0;
    std::uint64_t episodes = 0;
    bool seed_set = false;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
    cmd->add_option("-c,--config", f.config, "Experiment config (JSON); defaults to the built-in four-arm instance");
    cmd->add_option("-o,--out", f.out, "Output CSV path (relative paths resolve under $FEDRMAB_OUT_DIR)");
    cmd->add_option("--trials", f.trials, "Override the number of Monte-Carlo trials");
    cmd->add_option("--seed", f.seed, "Override the master seed");
    cmd->add_option("--threads", f.threads, "Worker threads for trials");
    cmd->add_option("--episodes", f.episodes, "Override the number of episodes");
}

/// `cmd` is null when the subcommand takes no override flags.
fedrmab_status load_config(const ExperimentFlags& f, const CLI::App* cmd, ConfigHandle& h) {
    fedrmab_status s = f.config.empty() ? fedrmab_config_builtin(&h.ptr)
                                        : fedrmab_config_from_file(f.config.c_str(), &h.ptr);
    if (s != FEDRMAB_OK) return s;
    if (!f.policy.empty() && (s = fedrmab_config_set_policy(h.ptr, f.policy.c_str())) != FEDRMAB_OK) return s;
    auto set = [&](const char* flag, const char* key, std::uint64_t v) {
        if (s == FEDRMAB_OK && cmd && cmd->count(flag) > 0) s = fedrmab_config_set_uint(h.ptr, key, v);
    };
    set("--trials", "trials", f.trials);
    set("--seed", "seed", f.seed);
    set("--threads", "threads", f.threads);
    set("--episodes", "episodes", f.episodes);
    return s;
}

std::filesystem::path output_path(const std::string& out, const std::string& fallback_name) {
    const char* dir = std::getenv("FEDRMAB_OUT_DIR");
    if (out.empty()) {
        if (!dir || !*dir) return {};
        return std::filesystem::path(dir) / fallback_name;
    }
    std::filesystem::path p(out);
    if (p.is_relative() && dir && *dir) p = std::filesystem::path(dir) / p;
    return p;
}

int write_output(const ResultHandle& r, const std::string& out, const std::string& fallback_name) {
    const auto path = output_path(out, fallback_name);
    if (path.empty()) {
        std::fwrite(fedrmab_result_text(r.ptr), 1, fedrmab_result_size(r.ptr), stdout);
        return std::fflush(stdout) == 0 ? 0 : kExitRuntime;
    }
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream file(path, std::ios::binary);
    file.write(fedrmab_result_text(r.ptr), static_cast<std::streamsize>(fedrmab_result_size(r.ptr)));
    if (!file) {
        std::cerr << "fed-rmab: cannot write " << path << "\n";
        return kExitRuntime;
    }
    std::cerr << "wrote " << path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated Thompson-sampling Whittle-index simulator for multi-channel access"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fedrmab_version());

    ExperimentFlags run_flags;
    auto* run = app.add_subcommand("run", "Run one configured experiment and emit per-episode CSV");
    add_experiment_flags(run, run_flags);
    run->add_option("--policy", run_flags.policy, "Override the policy kind");

    ExperimentFlags cmp_flags;
    std::vector<std::string> policies{"fedtswi", "wi-known", "feducb-wi", "fedts-myopic"};
    auto* compare = app.add_subcommand("compare", "Run several policies on one instance into a merged CSV");
    add_experiment_flags(compare, cmp_flags);
    compare->add_option("--policies", policies, "Policy kinds to compare")->delimiter(',');

    ExperimentFlags sweep_flags;
    std::string sweep_param;
    std::vector<std::uint64_t> sweep_values;
    auto* sweep = app.add_subcommand("sweep", "Vary the number of agents or K");
    add_experiment_flags(sweep, sweep_flags);
    sweep->add_option("--policy", sweep_flags.policy, "Override the policy kind");
    sweep->add_option("--param", sweep_param, "Parameter to vary")->required()->check(CLI::IsMember({"agents", "k"}));
    sweep->add_option("--values", sweep_values, "Values to try")->required()->delimiter(',');

    double t01 = 0.0, t11 = 0.0, rate = 1.0, tol = 1e-4;
    std::size_t grid = 21;
    std::string wt_out;
    auto* wt = app.add_subcommand("whittle-table", "Closed-form vs numeric Whittle index on a belief grid");
    wt->add_option("--theta01", t01, "P(bad -> good)")->required();
    wt->add_option("--theta11", t11, "P(good -> good)")->required();
    wt->add_option("--rate", rate, "Transmission rate of the good state");
    wt->add_option("--grid", grid, "Number of evenly spaced beliefs in [0, 1]");
    wt->add_option("--tol", tol, "Bisection tolerance of the numeric index");
    wt->add_option("-o,--out", wt_out, "Output CSV path");

    std::string bind = "127.0.0.1:7878", serve_config, serve_out;
    int join_timeout_ms = 60000;
    auto* serve = app.add_subcommand("serve", "Federation server: aggregate agent reports over TCP");
    serve->add_option("--bind", bind, "host:port to listen on");
    serve->add_option("-c,--config", serve_config, "Experiment config (JSON)");
    serve->add_option("--join-timeout", join_timeout_ms, "Milliseconds to wait for each agent to join");
    serve->add_option("-o,--out", serve_out, "Output CSV path");

    std::string server_addr, agent_config;
    std::size_t agent_id = 0;
    std::uint64_t agent_seed = 0;
    auto* agent = app.add_subcommand("agent", "Federation agent: simulate locally, report counts");
    agent->add_option("--server", server_addr, "host:port of the server")->required();
    agent->add_option("--id", agent_id, "Agent index in [0, agents)")->required();
    agent->add_option("--seed", agent_seed, "Master seed of the experiment")->required();
    agent->add_option("-c,--config", agent_config, "Experiment config (JSON); must match the server's");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (run->parsed() || compare->parsed() || sweep->parsed()) {
        CLI::App* cmd = run->parsed() ? run : compare->parsed() ? compare : sweep;
        const ExperimentFlags& f = run->parsed() ? run_flags : compare->parsed() ? cmp_flags : sweep_flags;
        ConfigHandle cfg;
        if (auto s = load_config(f, cmd, cfg); s != FEDRMAB_OK) return report_config();
        ResultHandle r;
        fedrmab_status s;
        if (run->parsed()) {
            s = fedrmab_run(cfg.ptr, &r.ptr);
        } else if (compare->parsed()) {
            std::vector<const char*> names;
            for (const auto& p : policies) names.push_back(p.c_str());
            s = fedrmab_compare(cfg.ptr, names.data(), names.size(), &r.ptr);
        } else {
            s = fedrmab_sweep(cfg.ptr, sweep_param.c_str(), sweep_values.data(), sweep_values.size(), &r.ptr);
        }
        if (s != FEDRMAB_OK) return report(s);
        return write_output(r, f.out, cmd->get_name() + ".csv");
    }

    if (wt->parsed()) {
        ResultHandle r;
        if (auto s = fedrmab_whittle_table(t01, t11, rate, grid, tol, &r.ptr); s != FEDRMAB_OK) return report(s);
        return write_output(r, wt_out, "whittle-table.csv");
    }

    if (serve->parsed()) {
        ExperimentFlags f;
        f.config = serve_config;
        ConfigHandle cfg;
        if (auto s = load_config(f, nullptr, cfg); s != FEDRMAB_OK) return report_config();
        ResultHandle r;
        auto on_listening = [](std::uint16_t port, void*) {
            std::cerr << "listening on port " << port << "\n";
        };
        if (auto s = fedrmab_serve(cfg.ptr, bind.c_str(), join_timeout_ms, on_listening, nullptr, &r.ptr);
            s != FEDRMAB_OK)
            return report(s);
        return write_output(r, serve_out, "serve.csv");
    }

    if (agent->parsed()) {
        ExperimentFlags f;
        f.config = agent_config;
        ConfigHandle cfg;
        if (auto s = load_config(f, nullptr, cfg); s != FEDRMAB_OK) return report_config();
        return report(fedrmab_agent_run(cfg.ptr, server_addr.c_str(), agent_id, agent_seed));
    }
    return 0;
}
