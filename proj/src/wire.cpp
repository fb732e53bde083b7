#include "fedrmab/wire.hpp"

#include <cstdio>

#include <json.hpp>

#include "fedrmab/error.hpp"

namespace fedrmab {

using nlohmann::json;

std::string_view to_string(MessageKind kind) {
    switch (kind) {
    case MessageKind::Join: return "JOIN";
    case MessageKind::Policy: return "POLICY";
    case MessageKind::Report: return "REPORT";
    case MessageKind::Shutdown: return "SHUTDOWN";
    }
    return "SHUTDOWN";
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
    if (s.empty() || s.size() > 16) throw ProtocolError("bad config hash");
    std::uint64_t v = 0;
    for (char c : s) {
        v <<= 4;
        if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
        else throw ProtocolError("bad config hash");
    }
    return v;
}

// Counts and indices must be exact: reject negatives and fractions instead of
// letting the JSON library wrap or truncate them.
std::uint64_t to_unsigned(const json& v) {
    if (!v.is_number_unsigned()) throw ProtocolError("expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::vector<std::uint64_t> to_unsigned_list(const json& v) {
    if (!v.is_array()) throw ProtocolError("expected an array of nonnegative integers");
    std::vector<std::uint64_t> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(to_unsigned(x));
    return out;
}

}  // namespace

std::string encode(const Message& msg) {
    json j;
    j["kind"] = std::string(to_string(msg.kind));
    j["episode"] = msg.episode;
    switch (msg.kind) {
    case MessageKind::Join:
        j["agent"] = msg.agent_id;
        j["config_hash"] = hex64(msg.config_hash);
        break;
    case MessageKind::Policy: {
        json dyn = json::array();
        for (const auto& d : msg.plan.policy.dynamics) dyn.push_back({d.theta01, d.theta11});
        j["policy"] = std::string(to_string(msg.plan.policy.kind));
        j["dynamics"] = dyn;
        j["fixed_arms"] = msg.plan.policy.fixed_arms;
        j["prev_len"] = msg.plan.prev_len;
        j["slot_limit"] = msg.plan.slot_limit;
        break;
    }
    case MessageKind::Report:
        j["agent"] = msg.report.agent;
        j["counts"] = msg.report.counts.flat();
        j["pulls"] = msg.report.pulls;
        j["slots"] = msg.report.slots;
        j["reward"] = msg.report.reward;
        j["end_reason"] = std::string(to_string(msg.report.reason));
        break;
    case MessageKind::Shutdown:
        j["reason"] = msg.reason;
        break;
    }
    return j.dump();
}

Message decode(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("malformed message: ") + e.what());
    }
    try {
        Message m;
        const auto kind = j.at("kind").get<std::string>();
        m.episode = to_unsigned(j.at("episode"));
        if (kind == "JOIN") {
            m.kind = MessageKind::Join;
            m.agent_id = to_unsigned(j.at("agent"));
            m.config_hash = parse_hex64(j.at("config_hash").get<std::string>());
        } else if (kind == "POLICY") {
            m.kind = MessageKind::Policy;
            const auto name = j.at("policy").get<std::string>();
            const auto pk = parse_policy_kind(name);
            if (!pk) throw ProtocolError("unknown policy kind " + name);
            m.plan.episode = m.episode;
            m.plan.policy.kind = *pk;
            for (const auto& d : j.at("dynamics")) {
                if (!d.is_array() || d.size() != 2) throw ProtocolError("dynamics entries are [theta01, theta11]");
                m.plan.policy.dynamics.push_back({d[0].get<double>(), d[1].get<double>()});
            }
            for (auto n : to_unsigned_list(j.at("fixed_arms"))) m.plan.policy.fixed_arms.push_back(n);
            m.plan.prev_len = to_unsigned(j.at("prev_len"));
            m.plan.slot_limit = to_unsigned(j.at("slot_limit"));
        } else if (kind == "REPORT") {
            m.kind = MessageKind::Report;
            m.report.agent = to_unsigned(j.at("agent"));
            m.report.episode = m.episode;
            m.report.counts = TransitionCounts::from_flat(to_unsigned_list(j.at("counts")));
            m.report.pulls = to_unsigned_list(j.at("pulls"));
            m.report.slots = to_unsigned(j.at("slots"));
            m.report.reward = j.at("reward").get<double>();
            const auto reason = parse_end_reason(j.at("end_reason").get<std::string>());
            if (!reason) throw ProtocolError("unknown end reason");
            m.report.reason = *reason;
        } else if (kind == "SHUTDOWN") {
            m.kind = MessageKind::Shutdown;
            m.reason = j.value("reason", std::string());
        } else {
            throw ProtocolError("unknown message kind " + kind);
        }
        return m;
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed message: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ProtocolError(std::string("malformed message: ") + e.what());
    }
}

}  // namespace fedrmab
