#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fedrmab/fedtswi.hpp"

namespace fedrmab {

enum class MessageKind { Join, Policy, Report, Shutdown };

std::string_view to_string(MessageKind kind);

/**
 * One federation message. Which fields are meaningful depends on `kind`:
 *   JOIN      agent_id, config_hash
 *   POLICY    episode, plan
 *   REPORT    episode, report
 *   SHUTDOWN  reason (empty on a normal end of run)
 */
struct Message {
    MessageKind kind = MessageKind::Shutdown;
    std::uint64_t episode = 0;
    std::size_t agent_id = 0;
    std::uint64_t config_hash = 0;
    EpisodePlan plan;
    AgentReport report;
    std::string reason;
};

/// Single-line JSON encoding (no trailing newline). Doubles round-trip exactly.
std::string encode(const Message& msg);
/// Throws ProtocolError on malformed input.
Message decode(std::string_view line);

}  // namespace fedrmab
