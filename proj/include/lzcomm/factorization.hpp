#pragma once

#include "lzcomm/symbol_string.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lzcomm {

enum class Mode { LZN, LZS, CN };

std::string_view mode_name(Mode mode) noexcept;
Mode parse_mode(std::string_view name);

/// One factor triple. `source` is 1-based (0 for a fresh letter) and `length`
/// is the full factor length.
///
/// In LZN/LZS a regular factor is a copy of length-1 symbols followed by
/// `last`. The final factor of a string whose match runs into the end is
/// stored `truncated`: a pure copy of `length` symbols whose last symbol is
/// `last`. CN factors are always pure copies (or fresh letters) and never
/// carry the flag.
struct Factor {
    std::size_t source = 0;
    std::size_t length = 1;
    Symbol last = 0;
    bool truncated = false;

    bool fresh() const noexcept { return source == 0; }

    friend bool operator==(const Factor&, const Factor&) = default;
};

class Factorization {
public:
    Factorization() = default;
    Factorization(Mode mode, std::vector<Factor> factors);

    Mode mode() const noexcept { return mode_; }
    const std::vector<Factor>& factors() const noexcept { return factors_; }
    std::size_t size() const noexcept { return factors_.size(); }
    bool empty() const noexcept { return factors_.empty(); }
    const Factor& operator[](std::size_t i) const { return factors_[i]; }
    std::size_t original_length() const noexcept { return original_length_; }

    auto begin() const noexcept { return factors_.begin(); }
    auto end() const noexcept { return factors_.end(); }

    /// 1-based start position of every factor.
    std::vector<std::size_t> start_positions() const;

    friend bool operator==(const Factorization&, const Factorization&) = default;

private:
    Mode mode_ = Mode::LZN;
    std::vector<Factor> factors_;
    std::size_t original_length_ = 0;
};

Factorization factorize_lzn(std::span<const Symbol> s);
Factorization factorize_lzs(std::span<const Symbol> s);
Factorization factorize_cn(std::span<const Symbol> s);
Factorization factorize(std::span<const Symbol> s, Mode mode);

/// Incremental LZN/CN parser over a fixed text. Factors are produced on
/// demand, so a caller that only needs a prefix of the factorization pays
/// only for the part of the text it covers.
class GreedyParser {
public:
    GreedyParser(std::span<const Symbol> text, Mode mode);
    ~GreedyParser();
    GreedyParser(GreedyParser&&) noexcept;
    GreedyParser& operator=(GreedyParser&&) noexcept;

    std::optional<Factor> next();
    std::size_t position() const noexcept { return pos_; }
    bool done() const noexcept { return pos_ >= text_.size(); }

private:
    struct Automaton;

    std::span<const Symbol> text_;
    Mode mode_;
    std::size_t pos_ = 0;
    std::unique_ptr<Automaton> automaton_;
};

/// Rebuilds the string. Throws MalformedFactorization naming the first
/// factor that breaks the invariants of the factorization's mode.
SymbolString decompress(const Factorization& f);

/// Throws MalformedFactorization unless `f` is exactly the greedy,
/// leftmost-source factorization of its own expansion.
void require_canonical(const Factorization& f);

std::size_t lcp(std::span<const Symbol> x, std::span<const Symbol> y) noexcept;

struct HammingResult {
    std::size_t distance = 0;
    std::vector<std::size_t> positions; // 1-based
};

/// Positionwise scan; throws Error when the lengths differ.
HammingResult hamming_oracle(std::span<const Symbol> x, std::span<const Symbol> y);

/// Returns (#a$, $b#) using the reserved sentinel ids.
std::pair<SymbolString, SymbolString> wrap_sentinels(std::span<const Symbol> a, std::span<const Symbol> b);

// Text format: header "#mode=LZN n=<len> format=text|ints", then one
// "source<TAB>length<TAB>lastSymbol" line per factor. A truncated final
// factor carries a fourth column "T".
std::string write_factorization(const Factorization& f, SymbolFormat format);
Factorization read_factorization(std::string_view data);

/// Renders "(s,p,c),..." the way the triples are usually printed: fresh
/// letters show length 0.
std::string render_triples(const Factorization& f, SymbolFormat format);

} // namespace lzcomm
