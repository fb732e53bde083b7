#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fedrmab/config.hpp"
#include "fedrmab/fedtswi.hpp"
#include "fedrmab/harness.hpp"

namespace fedrmab {

/// Line-oriented TCP stream. Owns the descriptor.
class LineSocket {
public:
    LineSocket() = default;
    explicit LineSocket(int fd) : fd_(fd) {}
    LineSocket(LineSocket&& other) noexcept;
    LineSocket& operator=(LineSocket&& other) noexcept;
    LineSocket(const LineSocket&) = delete;
    LineSocket& operator=(const LineSocket&) = delete;
    ~LineSocket();

    static LineSocket connect(const std::string& address);

    void send_line(const std::string& line);
    /// Next line without the newline; nullopt on orderly EOF. Throws NetworkError on
    /// timeout (when given) or socket errors.
    std::optional<std::string> read_line(std::optional<std::chrono::milliseconds> timeout = std::nullopt);

    bool valid() const { return fd_ >= 0; }
    void close();

private:
    int fd_ = -1;
    std::string buffer_;
};

class Listener {
public:
    explicit Listener(const std::string& bind_address);
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;
    ~Listener();

    std::uint16_t port() const { return port_; }
    /// Throws NetworkError if nobody connects within `timeout`.
    LineSocket accept(std::chrono::milliseconds timeout);

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

struct ServeOptions {
    /// How long to wait for the next agent to connect during the join phase.
    std::chrono::milliseconds join_timeout{30000};
    /// Called once the listening socket is bound (useful with port 0).
    std::function<void(std::uint16_t)> on_listening;
};

/**
 * Runs the server side of one networked trial: waits for `config.agents`
 * JOINs with a matching config hash, then drives the episodes over TCP.
 * Agents with a wrong hash are answered with a rejecting SHUTDOWN.
 * Any agent disconnect aborts the run with NetworkError naming the episode.
 * The result has the shape of a one-trial Monte-Carlo run.
 */
MonteCarloResult serve(const std::string& bind_address, const ExperimentConfig& config,
                                 const ServeOptions& options = {});

/**
 * Agent process: JOIN, then run one local episode per POLICY and answer with
 * a REPORT, until SHUTDOWN. `master_seed` is the experiment seed; the agent
 * derives its streams exactly as the in-process runner does.
 */
void agent_run(const std::string& server_address, std::size_t agent_id, std::uint64_t master_seed,
               const ExperimentConfig& config);

}  // namespace fedrmab
