#include "fedrmab/fednet.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "fedrmab/error.hpp"
#include "fedrmab/harness.hpp"
#include "fedrmab/wire.hpp"

namespace fedrmab {

namespace {

std::pair<std::string, std::string> split_address(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos) throw InvalidArgument("address must be host:port, got " + address);
    std::string host = address.substr(0, colon);
    if (host.empty()) host = "0.0.0.0";
    return {host, address.substr(colon + 1)};
}

std::string errno_text() { return std::strerror(errno); }

struct AddrInfo {
    addrinfo* head = nullptr;
    ~AddrInfo() {
        if (head) freeaddrinfo(head);
    }
};

AddrInfo resolve(const std::string& address, bool passive) {
    const auto [host, port] = split_address(address);
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    AddrInfo info;
    if (int rc = getaddrinfo(host.c_str(), port.c_str(), &hints, &info.head); rc != 0)
        throw NetworkError("cannot resolve " + address + ": " + gai_strerror(rc));
    return info;
}

}  // namespace

// ---------------------------------------------------------------------------

LineSocket::LineSocket(LineSocket&& other) noexcept : fd_(other.fd_), buffer_(std::move(other.buffer_)) {
    other.fd_ = -1;
}

LineSocket& LineSocket::operator=(LineSocket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        buffer_ = std::move(other.buffer_);
        other.fd_ = -1;
    }
    return *this;
}

LineSocket::~LineSocket() { close(); }

void LineSocket::close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

LineSocket LineSocket::connect(const std::string& address) {
    AddrInfo info = resolve(address, false);
    for (addrinfo* ai = info.head; ai; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return LineSocket(fd);
        }
        ::close(fd);
    }
    throw NetworkError("cannot connect to " + address + ": " + errno_text());
}

void LineSocket::send_line(const std::string& line) {
    if (fd_ < 0) throw NetworkError("send on closed socket");
    std::string data = line;
    data += '\n';
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw NetworkError("send failed: " + errno_text());
        }
        sent += static_cast<std::size_t>(n);
    }
}

std::optional<std::string> LineSocket::read_line(std::optional<std::chrono::milliseconds> timeout) {
    if (fd_ < 0) throw NetworkError("read on closed socket");
    for (;;) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        if (timeout) {
            pollfd p{fd_, POLLIN, 0};
            const int rc = ::poll(&p, 1, static_cast<int>(timeout->count()));
            if (rc == 0) throw NetworkError("timed out waiting for peer");
            if (rc < 0 && errno != EINTR) throw NetworkError("poll failed: " + errno_text());
            if (rc < 0) continue;
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n == 0) return std::nullopt;
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == ECONNRESET) return std::nullopt;
            throw NetworkError("recv failed: " + errno_text());
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

Listener::Listener(const std::string& bind_address) {
    AddrInfo info = resolve(bind_address, true);
    for (addrinfo* ai = info.head; ai; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
            fd_ = fd;
            break;
        }
        ::close(fd);
    }
    if (fd_ < 0) throw NetworkError("cannot listen on " + bind_address + ": " + errno_text());
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Listener::~Listener() {
    if (fd_ >= 0) ::close(fd_);
}

LineSocket Listener::accept(std::chrono::milliseconds timeout) {
    for (;;) {
        pollfd p{fd_, POLLIN, 0};
        const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
        if (rc == 0) throw NetworkError("timed out waiting for agents to join");
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw NetworkError("poll failed: " + errno_text());
        }
        const int fd = ::accept(fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR || errno == ECONNABORTED) continue;
            throw NetworkError("accept failed: " + errno_text());
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        return LineSocket(fd);
    }
}

// ---------------------------------------------------------------------------

MonteCarloResult serve(const std::string& bind_address, const ExperimentConfig& config,
                       const ServeOptions& options) {
    config.validate();
    const std::uint64_t expected_hash = config.hash();
    const std::uint64_t seed = trial_seed(config.seed, 0);

    Listener listener(bind_address);
    if (options.on_listening) options.on_listening(listener.port());

    std::vector<LineSocket> agents(config.agents);
    std::size_t joined = 0;
    while (joined < config.agents) {
        LineSocket conn = listener.accept(options.join_timeout);
        auto line = conn.read_line(options.join_timeout);
        if (!line) continue;
        Message reject;
        reject.kind = MessageKind::Shutdown;
        Message join;
        try {
            join = decode(*line);
        } catch (const ProtocolError& e) {
            reject.reason = std::string("rejected: ") + e.what();
            conn.send_line(encode(reject));
            continue;
        }
        if (join.kind != MessageKind::Join) reject.reason = "rejected: expected JOIN";
        else if (join.config_hash != expected_hash) reject.reason = "rejected: config hash mismatch";
        else if (join.agent_id >= config.agents) reject.reason = "rejected: agent id out of range";
        else if (agents[join.agent_id].valid()) reject.reason = "rejected: duplicate agent id";
        if (!reject.reason.empty()) {
            conn.send_line(encode(reject));
            continue;
        }
        agents[join.agent_id] = std::move(conn);
        ++joined;
    }

    MonteCarloResult result;
    result.label = std::string(to_string(config.policy));
    result.rho_ref = resolve_reference(config);
    Coordinator server(config, seed, result.rho_ref);
    while (!server.done()) {
        const EpisodePlan plan = server.plan_episode();
        Message policy;
        policy.kind = MessageKind::Policy;
        policy.episode = plan.episode;
        policy.plan = plan;
        const std::string encoded = encode(policy);
        for (std::size_t m = 0; m < agents.size(); ++m) {
            try {
                agents[m].send_line(encoded);
            } catch (const NetworkError& e) {
                throw NetworkError("agent " + std::to_string(m) + " unreachable in episode " +
                                   std::to_string(plan.episode) + ": " + e.what());
            }
        }

        std::vector<AgentReport> reports;
        reports.reserve(agents.size());
        for (std::size_t m = 0; m < agents.size(); ++m) {
            auto line = agents[m].read_line();
            if (!line)
                throw NetworkError("agent " + std::to_string(m) + " disconnected during episode " +
                                   std::to_string(plan.episode));
            Message msg = decode(*line);
            if (msg.kind != MessageKind::Report || msg.episode != plan.episode || msg.report.agent != m)
                throw ProtocolError("agent " + std::to_string(m) + " sent an unexpected message in episode " +
                                    std::to_string(plan.episode));
            reports.push_back(std::move(msg.report));
        }
        server.finish_episode(reports);
    }

    Message bye;
    bye.kind = MessageKind::Shutdown;
    for (auto& a : agents) {
        try {
            a.send_line(encode(bye));
        } catch (const NetworkError&) {
            // The run is complete; a vanished agent no longer matters.
        }
    }
    result.trials.push_back(server.records());
    result.rows = aggregate_trials(result.trials);
    return result;
}

void agent_run(const std::string& server_address, std::size_t agent_id, std::uint64_t master_seed,
               const ExperimentConfig& config) {
    config.validate();
    if (agent_id >= config.agents) throw InvalidArgument("agent id out of range for this config");
    LineSocket conn = LineSocket::connect(server_address);

    Message join;
    join.kind = MessageKind::Join;
    join.agent_id = agent_id;
    join.config_hash = config.hash();
    conn.send_line(encode(join));

    AgentState state(config.arms, config.k, agent_seed(trial_seed(master_seed, 0), agent_id));
    std::uint64_t last_episode = 0;
    for (;;) {
        auto line = conn.read_line();
        if (!line) throw NetworkError("server closed the connection");
        const Message msg = decode(*line);
        if (msg.kind == MessageKind::Shutdown) {
            if (!msg.reason.empty()) throw ProtocolError("server: " + msg.reason);
            return;
        }
        if (msg.kind != MessageKind::Policy) throw ProtocolError("expected POLICY or SHUTDOWN");
        if (msg.episode <= last_episode) throw ProtocolError("episode numbers must increase");
        last_episode = msg.episode;

        const auto& dyn = msg.plan.policy.dynamics;
        if (dyn.size() != config.arms.size()) throw ProtocolError("POLICY has the wrong number of arms");
        for (const auto& d : dyn) {
            if (!(d.theta01 >= kDynamicsEps && d.theta01 <= 1.0 - kDynamicsEps &&
                  d.theta11 >= kDynamicsEps && d.theta11 <= 1.0 - kDynamicsEps))
                throw ProtocolError("POLICY dynamics outside [eps, 1 - eps]");
        }

        EpisodeTrace trace = run_agent_episode(state, msg.plan, config.agents, agent_id);
        Message report;
        report.kind = MessageKind::Report;
        report.episode = msg.episode;
        report.report = std::move(trace.reports.front());
        conn.send_line(encode(report));
    }
}

}  // namespace fedrmab
