#include <doctest.h>

#include "fedrmab/error.hpp"
#include "fedrmab/wire.hpp"
#include "support.hpp"

using namespace fedrmab;

namespace {

Message random_message(testing::Gen& g) {
    Message m;
    m.kind = static_cast<MessageKind>(g.integer(0, 3));
    const std::size_t arms = g.integer(1, 6);
    switch (m.kind) {
    case MessageKind::Join:
        m.agent_id = g.integer(0, 100);
        m.config_hash = g.integer(0, ~std::uint64_t{0});
        break;
    case MessageKind::Policy:
        m.episode = g.integer(1, 1000000);
        m.plan.episode = m.episode;
        m.plan.policy.kind = static_cast<PolicyKind>(g.integer(0, 7));
        for (std::size_t n = 0; n < arms; ++n) {
            // Raw 53-bit doubles exercise exact round trips.
            m.plan.policy.dynamics.push_back({g.unit(), g.unit() * 1e-7});
        }
        for (std::size_t n = 0; n < g.integer(0, arms); ++n) m.plan.policy.fixed_arms.push_back(n);
        m.plan.prev_len = g.integer(1, 1u << 30);
        m.plan.slot_limit = g.integer(0, 1u << 30);
        break;
    case MessageKind::Report: {
        m.episode = g.integer(1, 1000000);
        std::vector<std::uint64_t> flat(arms * 4);
        for (auto& c : flat) c = g.integer(0, std::uint64_t{1} << 62);
        m.report.agent = g.integer(0, 50);
        m.report.episode = m.episode;
        m.report.counts = TransitionCounts::from_flat(flat);
        for (std::size_t n = 0; n < arms; ++n) m.report.pulls.push_back(g.integer(0, 1u << 31));
        m.report.slots = g.integer(1, 1u << 20);
        m.report.reward = g.range(0, 1e6);
        m.report.reason = static_cast<EndReason>(g.integer(0, 2));
        break;
    }
    case MessageKind::Shutdown:
        m.reason = g.integer(0, 1) ? "" : "rejected: \"quoted\"\nnewline";
        break;
    }
    return m;
}

void check_same(const Message& a, const Message& b) {
    REQUIRE(a.kind == b.kind);
    switch (a.kind) {
    case MessageKind::Join:
        CHECK(a.agent_id == b.agent_id);
        CHECK(a.config_hash == b.config_hash);
        break;
    case MessageKind::Policy:
        CHECK(a.episode == b.episode);
        CHECK(a.plan.episode == b.plan.episode);
        CHECK(a.plan.policy.kind == b.plan.policy.kind);
        CHECK(a.plan.policy.dynamics == b.plan.policy.dynamics);
        CHECK(a.plan.policy.fixed_arms == b.plan.policy.fixed_arms);
        CHECK(a.plan.prev_len == b.plan.prev_len);
        CHECK(a.plan.slot_limit == b.plan.slot_limit);
        break;
    case MessageKind::Report:
        CHECK(a.episode == b.episode);
        CHECK(a.report.agent == b.report.agent);
        CHECK(a.report.episode == b.report.episode);
        CHECK(a.report.counts == b.report.counts);
        CHECK(a.report.pulls == b.report.pulls);
        CHECK(a.report.slots == b.report.slots);
        CHECK(a.report.reward == b.report.reward);
        CHECK(a.report.reason == b.report.reason);
        break;
    case MessageKind::Shutdown:
        CHECK(a.reason == b.reason);
        break;
    }
}

}  // namespace

TEST_SUITE("wire") {

TEST_CASE("property: decode inverts encode") {
    testing::Gen g(701);
    for (int i = 0; i < 2000; ++i) {
        const Message m = random_message(g);
        const std::string line = encode(m);
        REQUIRE(line.find('\n') == std::string::npos);
        check_same(m, decode(line));
    }
}

TEST_CASE("messages are readable JSON lines") {
    Message join;
    join.kind = MessageKind::Join;
    join.agent_id = 3;
    join.config_hash = 0xabc;
    const auto line = encode(join);
    CHECK(line.find("\"kind\":\"JOIN\"") != std::string::npos);
    CHECK(line.find("\"config_hash\":\"0000000000000abc\"") != std::string::npos);
}

TEST_CASE("malformed input is a protocol error") {
    const char* bad[] = {
        "",
        "{",
        "[]",
        R"({"kind":"HELLO"})",
        R"({"kind":"JOIN","episode":0,"agent":1})",
        R"({"kind":"JOIN","episode":0,"agent":1,"config_hash":"xyz"})",
        R"({"kind":"REPORT","episode":1,"agent":0,"counts":[1,2,3],"pulls":[1],"slots":1,"reward":0,"end_reason":"budget"})",
        R"({"kind":"REPORT","episode":1,"agent":0,"counts":[1,2,3,-4],"pulls":[1],"slots":1,"reward":0,"end_reason":"budget"})",
        R"({"kind":"REPORT","episode":1,"agent":0,"counts":[1,2,3,4],"pulls":[1],"slots":1,"reward":0,"end_reason":"later"})",
        R"({"kind":"POLICY","episode":1,"policy":"fedtswi","dynamics":[[0.1]],"fixed_arms":[],"prev_len":1,"slot_limit":0})",
        R"({"kind":"POLICY","episode":1,"policy":"nope","dynamics":[],"fixed_arms":[],"prev_len":1,"slot_limit":0})",
    };
    for (const std::string text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(decode(text), ProtocolError);
    }
}

}
