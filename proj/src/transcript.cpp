#include "lzcomm/transcript.hpp"

#include "lzcomm/error.hpp"

#include <numeric>

namespace lzcomm {

using nlohmann::json;

std::uint64_t Transcript::total_bits() const noexcept
{
    std::uint64_t sum = 0;
    for (const auto& m : messages) sum += m.bits;
    return sum;
}

std::string to_json_lines(const Transcript& t)
{
    std::string out;
    for (const auto& m : t.messages) {
        json line = {{"speaker", speaker_name(m.speaker)}, {"kind", kind_name(m.kind)}, {"bits", m.bits}};
        out += line.dump();
        out += '\n';
    }
    json sessions = json::array();
    for (const auto& s : t.sessions) {
        json js = {{"n", s.n}, {"rounds", s.rounds}, {"bits", s.bits}};
        if (s.setup) js["setup"] = true;
        sessions.push_back(std::move(js));
    }
    json summary = {{"protocol", t.protocol}, {"width", t.width},         {"sigma", t.sigma},
                    {"rounds", t.rounds()},  {"bits", t.total_bits()},   {"sessions", std::move(sessions)},
                    {"result", t.result}};
    out += json{{"summary", std::move(summary)}}.dump();
    out += '\n';
    return out;
}

ParsedTranscript parse_json_lines(std::string_view text)
{
    ParsedTranscript p;
    bool have_summary = false;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t e = text.find('\n', pos);
        if (e == std::string_view::npos) e = text.size();
        const std::string_view line = text.substr(pos, e - pos);
        pos = e + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        if (have_summary) throw FormatError("line " + std::to_string(line_no) + ": data after summary record");
        try {
            const json j = json::parse(line);
            if (j.contains("summary")) {
                const json& s = j.at("summary");
                Transcript& t = p.transcript;
                t.protocol = s.at("protocol").get<std::string>();
                t.width = s.at("width").get<unsigned>();
                t.sigma = s.at("sigma").get<std::uint64_t>();
                p.claimed_rounds = s.at("rounds").get<std::size_t>();
                p.claimed_bits = s.at("bits").get<std::uint64_t>();
                for (const json& js : s.at("sessions")) {
                    SessionInfo info;
                    info.setup = js.value("setup", false);
                    info.n = js.at("n").get<std::uint64_t>();
                    info.rounds = js.at("rounds").get<std::size_t>();
                    info.bits = js.at("bits").get<std::uint64_t>();
                    t.sessions.push_back(info);
                }
                t.result = s.value("result", json::object());
                have_summary = true;
                continue;
            }
            Message m;
            m.speaker = parse_speaker(j.at("speaker").get<std::string>());
            m.kind = parse_kind(j.at("kind").get<std::string>());
            m.bits = j.at("bits").get<unsigned>();
            p.transcript.messages.push_back(m);
        } catch (const json::exception& ex) {
            throw FormatError("line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    if (!have_summary) throw FormatError("transcript has no summary record");
    return p;
}

ReplayReport replay(const Transcript& t)
{
    ReplayReport r;
    auto problem = [&](std::size_t i, const std::string& what) {
        r.problems.push_back("message " + std::to_string(i) + ": " + what);
    };
    std::size_t covered = std::accumulate(t.sessions.begin(), t.sessions.end(), std::size_t{0},
                                          [](std::size_t acc, const SessionInfo& s) { return acc + s.rounds; });
    if (covered != t.messages.size()) {
        r.problems.push_back("sessions cover " + std::to_string(covered) + " messages, transcript has " +
                             std::to_string(t.messages.size()));
        return r;
    }
    std::size_t i = 0;
    for (std::size_t si = 0; si < t.sessions.size(); ++si) {
        const SessionInfo& s = t.sessions[si];
        std::uint64_t bits = 0;
        for (std::size_t k = 0; k < s.rounds; ++k, ++i) {
            const Message& m = t.messages[i];
            bits += m.bits;
            const Speaker want = k % 2 == 0 ? Speaker::Alice : Speaker::Bob;
            if (m.speaker != want) problem(i, "speakers do not alternate");
            unsigned expected = 0;
            switch (m.kind) {
            case MessageKind::Fingerprint: expected = t.width; break;
            case MessageKind::Boolean: expected = 1; break;
            case MessageKind::Control: expected = kControlBits; break;
            case MessageKind::Length: expected = length_bits(s.n); break;
            case MessageKind::Triple: expected = 2 * length_bits(s.n) + symbol_bits(t.sigma); break;
            }
            if (s.setup && m.kind != MessageKind::Length) problem(i, "setup carries a non-length message");
            if (m.bits != expected) {
                problem(i, std::string(kind_name(m.kind)) + " of " + std::to_string(m.bits) + " bits, encoding gives " +
                               std::to_string(expected));
            }
        }
        if (bits != s.bits) {
            r.problems.push_back("session " + std::to_string(si) + " claims " + std::to_string(s.bits) +
                                 " bits, messages sum to " + std::to_string(bits));
        }
    }
    return r;
}

ReplayReport replay(const ParsedTranscript& p)
{
    ReplayReport r = replay(p.transcript);
    if (p.claimed_rounds != p.transcript.rounds()) {
        r.problems.push_back("summary claims " + std::to_string(p.claimed_rounds) + " rounds, found " +
                             std::to_string(p.transcript.rounds()));
    }
    if (p.claimed_bits != p.transcript.total_bits()) {
        r.problems.push_back("summary claims " + std::to_string(p.claimed_bits) + " bits, found " +
                             std::to_string(p.transcript.total_bits()));
    }
    return r;
}

} // namespace lzcomm
