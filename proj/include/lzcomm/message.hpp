#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace lzcomm {

enum class Speaker : std::uint8_t { Alice, Bob };
enum class MessageKind : std::uint8_t { Fingerprint, Boolean, Triple, Length, Control };

std::string_view speaker_name(Speaker s) noexcept;
std::string_view kind_name(MessageKind k) noexcept;
Speaker parse_speaker(std::string_view name);
MessageKind parse_kind(std::string_view name);

/// Two-bit control codes.
enum class Control : std::uint8_t { End = 0, Abort = 1 };

/// ceil(log2(n + 2)): bits of a length value or a triple coordinate.
unsigned length_bits(std::uint64_t n) noexcept;
/// ceil(log2(sigma + 3)): symbol code of a triple. Codes sigma and sigma+1 are
/// the two sentinels, sigma+2 marks a truncated factor (last symbol implied).
unsigned symbol_bits(std::uint64_t sigma) noexcept;
inline constexpr unsigned kControlBits = 2;

/// One channel message. `bits` is the exact payload size on the wire.
struct Message {
    Speaker speaker = Speaker::Alice;
    MessageKind kind = MessageKind::Control;
    unsigned bits = 0;
    std::uint64_t value = 0; // fingerprint, boolean, length, or control code
    // Triple payload.
    std::uint64_t source = 0;
    std::uint64_t length = 0;
    std::uint64_t symbol_code = 0;

    friend bool operator==(const Message&, const Message&) = default;
};

/// Payload bits packed MSB first, padded to whole bytes.
struct Frame {
    std::uint32_t bits = 0;
    std::vector<std::uint8_t> bytes;

    friend bool operator==(const Frame&, const Frame&) = default;
};

class BitWriter {
public:
    void put(std::uint64_t value, unsigned bits);
    Frame finish() &&;

private:
    Frame frame_;
};

class BitReader {
public:
    explicit BitReader(const Frame& frame) : frame_(frame) {}
    std::uint64_t get(unsigned bits);
    unsigned remaining() const noexcept { return frame_.bits - pos_; }

private:
    const Frame& frame_;
    std::uint32_t pos_ = 0;
};

/// Context a receiver needs to split a payload into fields.
struct CodecContext {
    std::uint64_t n = 0;     // session length, for lengths and triples
    std::uint64_t sigma = 0; // alphabet size, for triples
};

Frame encode(const Message& m, const CodecContext& ctx);
Message decode(const Frame& f, Speaker speaker, MessageKind kind, const CodecContext& ctx);

} // namespace lzcomm
