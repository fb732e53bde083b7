#include <doctest.h>

#include <future>
#include <thread>

#include "fedrmab/error.hpp"
#include "fedrmab/fednet.hpp"
#include "fedrmab/wire.hpp"

using namespace fedrmab;
using namespace std::chrono_literals;

namespace {

ExperimentConfig net_config(std::size_t agents, std::uint64_t episodes = 15) {
    ExperimentConfig c = builtin_instance();
    c.agents = agents;
    c.episodes = episodes;
    c.rho_ref = 0.98;
    c.seed = 21;
    return c;
}

/// Runs serve() on a background thread and hands back its port.
struct ServerThread {
    std::promise<std::uint16_t> port_promise;
    std::future<MonteCarloResult> result;

    ServerThread(const ExperimentConfig& cfg, std::chrono::milliseconds join_timeout = 10s) {
        ServeOptions opts;
        opts.join_timeout = join_timeout;
        opts.on_listening = [this](std::uint16_t p) { port_promise.set_value(p); };
        result = std::async(std::launch::async, [cfg, opts] { return serve("127.0.0.1:0", cfg, opts); });
    }

    std::string address() { return "127.0.0.1:" + std::to_string(port_promise.get_future().get()); }
};

}  // namespace

TEST_SUITE("fednet") {

TEST_CASE("one agent over loopback matches the in-process run") {
    const auto cfg = net_config(1);
    ServerThread server(cfg);
    const auto addr = server.address();
    agent_run(addr, 0, cfg.seed, cfg);
    const auto net = server.result.get();
    const auto local = run_monte_carlo(cfg);
    CHECK(net.trials == local.trials);
    CHECK(to_csv(std::span(&net, 1)) == to_csv(std::span(&local, 1)));
}

TEST_CASE("several agents complete a run") {
    const auto cfg = net_config(3, 10);
    ServerThread server(cfg);
    const auto addr = server.address();
    std::vector<std::jthread> agents;
    for (std::size_t m = 0; m < 3; ++m) agents.emplace_back([&, m] { agent_run(addr, m, cfg.seed, cfg); });
    agents.clear();
    const auto result = server.result.get();
    REQUIRE(result.rows.size() == 10);
    std::uint64_t prev = 0;
    for (const auto& rec : result.trials[0]) {
        CHECK(rec.t_end > prev);
        prev = rec.t_end;
    }
}

TEST_CASE("a join with another config is rejected") {
    const auto cfg = net_config(1, 5);
    ServerThread server(cfg);
    const auto addr = server.address();
    auto other = cfg;
    other.k = 1;
    CHECK_THROWS_AS(agent_run(addr, 0, cfg.seed, other), ProtocolError);
    // The server keeps waiting for a valid agent.
    agent_run(addr, 0, cfg.seed, cfg);
    CHECK(server.result.get().rows.size() == 5);
}

TEST_CASE("duplicate and out-of-range agent ids are rejected") {
    const auto cfg = net_config(2, 3);
    ServerThread server(cfg);
    const auto addr = server.address();

    LineSocket bad = LineSocket::connect(addr);
    Message join;
    join.kind = MessageKind::Join;
    join.agent_id = 5;
    join.config_hash = cfg.hash();
    bad.send_line(encode(join));
    const auto reply = decode(*bad.read_line(5s));
    CHECK(reply.kind == MessageKind::Shutdown);
    CHECK(reply.reason.find("rejected") == 0);

    std::jthread first([&] { agent_run(addr, 0, cfg.seed, cfg); });
    std::this_thread::sleep_for(100ms);
    LineSocket dup = LineSocket::connect(addr);
    join.agent_id = 0;
    dup.send_line(encode(join));
    const auto dup_reply = decode(*dup.read_line(5s));
    CHECK(dup_reply.reason.find("duplicate") != std::string::npos);

    agent_run(addr, 1, cfg.seed, cfg);
    first.join();
    CHECK(server.result.get().rows.size() == 3);
}

TEST_CASE("an agent vanishing mid-run aborts the server with the episode") {
    const auto cfg = net_config(1, 5);
    ServerThread server(cfg);
    {
        LineSocket sock = LineSocket::connect(server.address());
        Message join;
        join.kind = MessageKind::Join;
        join.config_hash = cfg.hash();
        sock.send_line(encode(join));
        const auto policy = decode(*sock.read_line(10s));
        CHECK(policy.kind == MessageKind::Policy);
        CHECK(policy.episode == 1);
    }
    try {
        server.result.get();
        FAIL("server should have aborted");
    } catch (const NetworkError& e) {
        CHECK(std::string(e.what()).find("episode 1") != std::string::npos);
    }
}

TEST_CASE("agents refuse dynamics outside the open unit interval") {
    const auto cfg = net_config(1);
    Listener fake("127.0.0.1:0");
    const std::string addr = "127.0.0.1:" + std::to_string(fake.port());
    auto agent = std::async(std::launch::async, [&] { agent_run(addr, 0, cfg.seed, cfg); });
    LineSocket conn = fake.accept(10s);
    CHECK(decode(*conn.read_line(10s)).kind == MessageKind::Join);
    Message policy;
    policy.kind = MessageKind::Policy;
    policy.episode = 1;
    policy.plan.policy.kind = PolicyKind::FedTSWI;
    policy.plan.policy.dynamics = {{0.2, 0.8}, {0.0, 0.5}, {0.3, 0.3}, {0.5, 0.5}};
    conn.send_line(encode(policy));
    CHECK_THROWS_AS(agent.get(), ProtocolError);
}

TEST_CASE("nobody joining times out") {
    ServerThread server(net_config(1), 200ms);
    server.address();
    CHECK_THROWS_AS(server.result.get(), NetworkError);
}

TEST_CASE("connecting to a closed port fails") {
    std::uint16_t port;
    {
        Listener l("127.0.0.1:0");
        port = l.port();
    }
    CHECK_THROWS_AS(LineSocket::connect("127.0.0.1:" + std::to_string(port)), NetworkError);
    CHECK_THROWS_AS(LineSocket::connect("no-port-here"), InvalidArgument);
}

}
