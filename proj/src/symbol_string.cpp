#include "lzcomm/symbol_string.hpp"

#include "lzcomm/error.hpp"

#include <algorithm>
#include <charconv>

namespace lzcomm {

SymbolFormat parse_symbol_format(std::string_view name)
{
    if (name == "text") return SymbolFormat::Text;
    if (name == "ints") return SymbolFormat::Ints;
    throw FormatError("unknown format '" + std::string(name) + "' (expected text|ints)");
}

SymbolString SymbolString::from_text(std::string_view utf8)
{
    std::vector<Symbol> out;
    out.reserve(utf8.size());
    std::size_t i = 0;
    while (i < utf8.size()) {
        auto lead = static_cast<unsigned char>(utf8[i]);
        std::size_t extra = 0;
        Symbol cp = 0;
        if (lead < 0x80) {
            cp = lead;
        } else if ((lead & 0xE0) == 0xC0) {
            cp = lead & 0x1F;
            extra = 1;
        } else if ((lead & 0xF0) == 0xE0) {
            cp = lead & 0x0F;
            extra = 2;
        } else if ((lead & 0xF8) == 0xF0) {
            cp = lead & 0x07;
            extra = 3;
        } else {
            throw FormatError("invalid UTF-8 lead byte at offset " + std::to_string(i));
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            if (i + k >= utf8.size()) {
                throw FormatError("truncated UTF-8 sequence at offset " + std::to_string(i));
            }
            auto cont = static_cast<unsigned char>(utf8[i + k]);
            if ((cont & 0xC0) != 0x80) {
                throw FormatError("invalid UTF-8 continuation byte at offset " + std::to_string(i + k));
            }
            cp = (cp << 6) | (cont & 0x3F);
        }
        static constexpr Symbol kMinForLength[] = {0, 0x80, 0x800, 0x10000};
        if (cp < kMinForLength[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            throw FormatError("invalid UTF-8 scalar at offset " + std::to_string(i));
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return SymbolString(std::move(out));
}

SymbolString SymbolString::from_ints(std::string_view tokens)
{
    std::vector<Symbol> out;
    std::size_t i = 0;
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (i < tokens.size()) {
        while (i < tokens.size() && is_space(tokens[i])) ++i;
        if (i == tokens.size()) break;
        std::size_t j = i;
        while (j < tokens.size() && !is_space(tokens[j])) ++j;
        std::uint64_t value = 0;
        auto token = tokens.substr(i, j - i);
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
            throw FormatError("invalid integer token '" + std::string(token) + "'");
        }
        if (value >= kHashSentinel) {
            throw FormatError("symbol id " + std::string(token) + " is reserved or out of range");
        }
        out.push_back(static_cast<Symbol>(value));
        i = j;
    }
    return SymbolString(std::move(out));
}

SymbolString SymbolString::parse(std::string_view data, SymbolFormat format)
{
    return format == SymbolFormat::Text ? from_text(data) : from_ints(data);
}

void append_utf8(std::string& out, Symbol s)
{
    if (s > 0x10FFFF || (s >= 0xD800 && s <= 0xDFFF)) {
        throw FormatError("symbol id " + std::to_string(s) + " has no UTF-8 encoding");
    }
    if (s < 0x80) {
        out.push_back(static_cast<char>(s));
    } else if (s < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (s >> 6)));
        out.push_back(static_cast<char>(0x80 | (s & 0x3F)));
    } else if (s < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (s >> 12)));
        out.push_back(static_cast<char>(0x80 | ((s >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (s & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (s >> 18)));
        out.push_back(static_cast<char>(0x80 | ((s >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((s >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (s & 0x3F)));
    }
}

std::string SymbolString::to_text() const
{
    std::string out;
    out.reserve(symbols_.size());
    for (Symbol s : symbols_) append_utf8(out, s);
    return out;
}

std::string SymbolString::to_ints() const
{
    std::string out;
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (i) out.push_back(' ');
        out += std::to_string(symbols_[i]);
    }
    return out;
}

std::string SymbolString::format(SymbolFormat format) const
{
    return format == SymbolFormat::Text ? to_text() : to_ints();
}

SymbolString SymbolString::suffix(std::size_t pos) const
{
    if (pos >= symbols_.size()) return {};
    return SymbolString(std::vector<Symbol>(symbols_.begin() + static_cast<std::ptrdiff_t>(pos), symbols_.end()));
}

SymbolString SymbolString::prefix(std::size_t len) const
{
    len = std::min(len, symbols_.size());
    return SymbolString(std::vector<Symbol>(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(len)));
}

bool SymbolString::has_sentinels() const noexcept
{
    return std::any_of(symbols_.begin(), symbols_.end(), [](Symbol s) { return is_sentinel(s); });
}

} // namespace lzcomm
