#pragma once

#include "lzcomm/factorization.hpp"
#include "lzcomm/fingerprint.hpp"
#include "lzcomm/message.hpp"
#include "lzcomm/transcript.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace lzcomm {

inline constexpr std::uint64_t kTextSigma = 0x110000;
inline constexpr std::uint64_t kIntsSigma = 0xFFFFFFFE;

struct ProtocolConfig {
    std::uint64_t seed = 0;
    unsigned width = 64;
    double epsilon = 1.0 / (1 << 20);
    bool sentinel = true;
    bool verify = false;
    std::uint64_t sigma = kIntsSigma;

    /// Throws Error on an out-of-range field.
    void validate() const;
};

/// Upper bound on the failure probability of one fingerprint comparison
/// between prefixes of at most `factors` factors.
double comparison_error_bound(std::uint64_t factors, unsigned width) noexcept;

struct LcpOutcome {
    std::uint64_t lcp = 0;
    std::uint64_t matching_factors = 0; // k
    std::uint64_t z = 0;                // zn of the common prefix
    Transcript transcript;
};

/// Per LCP invocation of the Hamming protocol.
struct JumpRecord {
    std::uint64_t offset = 0; // symbols already consumed (wrapped coordinates)
    std::uint64_t n = 0;      // remaining length
    std::uint64_t lcp = 0;
    std::uint64_t matching_factors = 0;
    std::size_t rounds = 0;
    std::uint64_t bits = 0;
};

struct HammingOutcome {
    bool aborted = false; // lengths differed
    std::uint64_t distance = 0;
    std::vector<std::uint64_t> positions; // 1-based positions in the original strings
    std::uint64_t raw_distance = 0;       // distance of the (possibly wrapped) strings
    std::uint64_t gap_max = 0;
    std::vector<JumpRecord> jumps;
    Transcript transcript;
};

/// One side of a two-party protocol as a reactive state machine. Incoming
/// frames are decoded from their bit count plus the party's own state.
class Party {
public:
    struct Outgoing {
        Message message;
        Frame frame;
    };

    virtual ~Party() = default;

    virtual Speaker role() const noexcept = 0;
    virtual std::vector<Outgoing> open() = 0;
    virtual Message decode(const Frame& frame) const = 0;
    virtual std::vector<Outgoing> receive(const Message& message) = 0;
    virtual bool finished() const noexcept = 0;

    /// Everything this party sent or received, in order.
    virtual Transcript transcript() const = 0;
};

/// `n` is the session length both parties agreed on (max of the two input
/// lengths).
std::unique_ptr<Party> make_lcp_party(Speaker role, const Factorization& input, std::uint64_t n,
                                      const ProtocolConfig& config);
std::unique_ptr<Party> make_hamming_party(Speaker role, const Factorization& input, const ProtocolConfig& config);

/// Results as seen by one finished party. Throw Error when the party is of
/// the other kind.
LcpOutcome lcp_outcome(const Party& party);
HammingOutcome hamming_outcome(const Party& party);

/// Runs both parties on one thread, delivering frames in FIFO order.
void run_in_process(Party& alice, Party& bob);

/// In-process runs. Inputs must be canonical LZN factorizations; both
/// parties' transcripts and results are checked to agree.
LcpOutcome lcp_protocol(const Factorization& alice, const Factorization& bob, const ProtocolConfig& config);
HammingOutcome hamming_protocol(const Factorization& alice, const Factorization& bob, const ProtocolConfig& config);

} // namespace lzcomm
