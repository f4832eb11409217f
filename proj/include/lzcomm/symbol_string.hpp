#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lzcomm {

using Symbol = std::uint32_t;

// Reserved ids, only ever inserted by wrap_sentinels().
inline constexpr Symbol kHashSentinel = 0xFFFFFFFEu;
inline constexpr Symbol kDollarSentinel = 0xFFFFFFFFu;

constexpr bool is_sentinel(Symbol s) noexcept { return s >= kHashSentinel; }

enum class SymbolFormat { Text, Ints };

SymbolFormat parse_symbol_format(std::string_view name);

/// Sequence of 32-bit symbol ids. Text input maps UTF-8 scalar values to ids,
/// integer input maps decimal tokens to ids.
class SymbolString {
public:
    SymbolString() = default;
    explicit SymbolString(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}
    SymbolString(std::span<const Symbol> symbols) : symbols_(symbols.begin(), symbols.end()) {}

    static SymbolString from_text(std::string_view utf8);
    static SymbolString from_ints(std::string_view tokens);
    static SymbolString parse(std::string_view data, SymbolFormat format);

    std::string to_text() const;
    std::string to_ints() const;
    std::string format(SymbolFormat format) const;

    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }

    std::span<const Symbol> span() const noexcept { return symbols_; }
    operator std::span<const Symbol>() const noexcept { return symbols_; }
    const std::vector<Symbol>& symbols() const noexcept { return symbols_; }

    auto begin() const noexcept { return symbols_.begin(); }
    auto end() const noexcept { return symbols_.end(); }

    /// 0-based suffix starting at `pos` (empty when pos >= size()).
    SymbolString suffix(std::size_t pos) const;
    SymbolString prefix(std::size_t len) const;

    bool has_sentinels() const noexcept;

    friend bool operator==(const SymbolString&, const SymbolString&) = default;

private:
    std::vector<Symbol> symbols_;
};

/// Encodes one symbol id as UTF-8 (sentinels are rejected).
void append_utf8(std::string& out, Symbol s);

} // namespace lzcomm
