#pragma once

#include "lzcomm/message.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lzcomm {

/// A run of consecutive messages belonging to one sub-protocol. `setup`
/// marks the Hamming length exchange; other sessions are LCP searches over
/// strings of length `n`.
struct SessionInfo {
    bool setup = false;
    std::uint64_t n = 0;
    std::size_t rounds = 0;
    std::uint64_t bits = 0;

    friend bool operator==(const SessionInfo&, const SessionInfo&) = default;
};

struct Transcript {
    std::string protocol; // "lcp" or "hamming"
    unsigned width = 64;
    std::uint64_t sigma = 0;
    std::vector<Message> messages;
    std::vector<SessionInfo> sessions;
    nlohmann::json result = nlohmann::json::object();

    std::size_t rounds() const noexcept { return messages.size(); }
    std::uint64_t total_bits() const noexcept;

    friend bool operator==(const Transcript&, const Transcript&) = default;
};

// One JSON object per line: {"speaker","kind","bits"} for every message, then
// {"summary": {...}} with protocol, width, sigma, rounds, bits, sessions and
// result.
std::string to_json_lines(const Transcript& t);

struct ParsedTranscript {
    Transcript transcript;
    std::size_t claimed_rounds = 0;
    std::uint64_t claimed_bits = 0;
};
ParsedTranscript parse_json_lines(std::string_view text);

struct ReplayReport {
    std::vector<std::string> problems;
    bool ok() const noexcept { return problems.empty(); }
};

/// Re-derives every message size from its kind and session context, checks
/// alternation inside sessions and the per-session sums.
ReplayReport replay(const Transcript& t);
/// As above, plus the summary's claimed totals.
ReplayReport replay(const ParsedTranscript& p);

} // namespace lzcomm
