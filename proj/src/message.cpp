#include "lzcomm/message.hpp"

#include "lzcomm/error.hpp"

#include <bit>
#include <string>

namespace lzcomm {

std::string_view speaker_name(Speaker s) noexcept { return s == Speaker::Alice ? "alice" : "bob"; }

std::string_view kind_name(MessageKind k) noexcept
{
    switch (k) {
    case MessageKind::Fingerprint: return "fingerprint";
    case MessageKind::Boolean: return "boolean";
    case MessageKind::Triple: return "triple";
    case MessageKind::Length: return "length";
    case MessageKind::Control: return "control";
    }
    return "?";
}

Speaker parse_speaker(std::string_view name)
{
    if (name == "alice") return Speaker::Alice;
    if (name == "bob") return Speaker::Bob;
    throw FormatError("unknown speaker '" + std::string(name) + "'");
}

MessageKind parse_kind(std::string_view name)
{
    for (auto k : {MessageKind::Fingerprint, MessageKind::Boolean, MessageKind::Triple, MessageKind::Length,
                   MessageKind::Control}) {
        if (kind_name(k) == name) return k;
    }
    throw FormatError("unknown message kind '" + std::string(name) + "'");
}

namespace {
unsigned ceil_log2(std::uint64_t x) noexcept { return x <= 1 ? 0 : static_cast<unsigned>(std::bit_width(x - 1)); }
} // namespace

unsigned length_bits(std::uint64_t n) noexcept { return ceil_log2(n + 2); }
unsigned symbol_bits(std::uint64_t sigma) noexcept { return ceil_log2(sigma + 3); }

void BitWriter::put(std::uint64_t value, unsigned bits)
{
    for (unsigned i = bits; i-- > 0;) {
        if (frame_.bits % 8 == 0) frame_.bytes.push_back(0);
        if ((value >> i) & 1u) frame_.bytes.back() |= static_cast<std::uint8_t>(0x80u >> (frame_.bits % 8));
        ++frame_.bits;
    }
}

Frame BitWriter::finish() && { return std::move(frame_); }

std::uint64_t BitReader::get(unsigned bits)
{
    if (bits > remaining()) throw ProtocolError("payload too short");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < bits; ++i, ++pos_) {
        v = (v << 1) | ((frame_.bytes[pos_ / 8] >> (7 - pos_ % 8)) & 1u);
    }
    return v;
}

Frame encode(const Message& m, const CodecContext& ctx)
{
    BitWriter w;
    switch (m.kind) {
    case MessageKind::Triple: {
        const unsigned l = length_bits(ctx.n);
        w.put(m.source, l);
        w.put(m.length, l);
        w.put(m.symbol_code, symbol_bits(ctx.sigma));
        break;
    }
    default:
        w.put(m.value, m.bits);
        break;
    }
    Frame f = std::move(w).finish();
    if (f.bits != m.bits) throw ProtocolError("message declares " + std::to_string(m.bits) + " bits, encodes to " +
                                              std::to_string(f.bits));
    return f;
}

Message decode(const Frame& f, Speaker speaker, MessageKind kind, const CodecContext& ctx)
{
    if (f.bytes.size() != (f.bits + 7) / 8) throw ProtocolError("frame size does not match its bit count");
    Message m;
    m.speaker = speaker;
    m.kind = kind;
    m.bits = f.bits;
    BitReader r(f);
    switch (kind) {
    case MessageKind::Boolean:
        if (f.bits != 1) throw ProtocolError("boolean payload must be 1 bit");
        m.value = r.get(1);
        break;
    case MessageKind::Control:
        if (f.bits != kControlBits) throw ProtocolError("control payload must be 2 bits");
        m.value = r.get(kControlBits);
        break;
    case MessageKind::Fingerprint:
    case MessageKind::Length:
        if (f.bits > 64) throw ProtocolError("value payload wider than 64 bits");
        m.value = r.get(f.bits);
        break;
    case MessageKind::Triple: {
        const unsigned l = length_bits(ctx.n);
        if (f.bits != 2 * l + symbol_bits(ctx.sigma)) throw ProtocolError("triple payload has the wrong size");
        m.source = r.get(l);
        m.length = r.get(l);
        m.symbol_code = r.get(symbol_bits(ctx.sigma));
        break;
    }
    }
    return m;
}

} // namespace lzcomm
