#pragma once

#include "lzcomm/symbol_string.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lzcomm::avl {

using ProductionId = std::uint32_t;

/// A CNF production with cached expansion length and parse-tree height
/// (terminals have height 1).
struct Production {
    enum class Kind : std::uint8_t { Terminal, Binary };

    Kind kind = Kind::Terminal;
    Symbol symbol = 0;
    ProductionId left = 0;
    ProductionId right = 0;
    std::uint64_t length = 1;
    std::uint32_t height = 1;
};

/// Append-only production arena. Grammars derived from one another share
/// their pool; operations only ever add productions, so ids stay valid.
/// A pool is not safe for concurrent mutation.
class ProductionPool {
public:
    ProductionId terminal(Symbol s);
    ProductionId binary(ProductionId left, ProductionId right);

    const Production& operator[](ProductionId id) const { return productions_[id]; }
    std::size_t size() const noexcept { return productions_.size(); }

    /// Raw insertion for importers; caches are trusted as given.
    ProductionId push_unchecked(const Production& p);

    /// Overwrites a cached height. Only for fault-injection tests.
    void corrupt_height(ProductionId id, std::uint32_t height) { productions_[id].height = height; }

private:
    std::vector<Production> productions_;
    std::unordered_map<Symbol, ProductionId> terminals_;
};

class AvlGrammar {
public:
    /// The empty grammar (no CNF grammar derives the empty string).
    AvlGrammar() = default;
    AvlGrammar(std::shared_ptr<ProductionPool> pool, std::optional<ProductionId> root)
        : pool_(std::move(pool)), root_(root) {}

    bool empty() const noexcept { return !root_.has_value(); }
    std::optional<ProductionId> root() const noexcept { return root_; }
    const std::shared_ptr<ProductionPool>& pool() const noexcept { return pool_; }

    std::uint64_t length() const;
    std::uint32_t height() const;

    /// Number of productions reachable from the root.
    std::size_t size() const;

private:
    std::shared_ptr<ProductionPool> pool_;
    std::optional<ProductionId> root_;
};

/// Grammar for `s` assembled from its non self-referencing C-factorization.
/// Throws GrammarError for the empty string.
AvlGrammar build(std::span<const Symbol> s);

/// Expands to expand(a) . expand(b). When the pools differ, b is copied into
/// a's pool first.
AvlGrammar concat(const AvlGrammar& a, const AvlGrammar& b);

/// Split point i (1-based): prefix = S[1..i-1], suffix = S[i..]. An empty
/// side comes back as the empty grammar. Throws GrammarError unless
/// 1 <= i <= length.
std::pair<AvlGrammar, AvlGrammar> split(const AvlGrammar& g, std::uint64_t i);

/// Grammar for S[i..j] (1-based, inclusive).
AvlGrammar extract(const AvlGrammar& g, std::uint64_t i, std::uint64_t j);

SymbolString expand(const AvlGrammar& g);
SymbolString expand_range(const AvlGrammar& g, std::uint64_t i, std::uint64_t j);

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Checks acyclicity, cached lengths/heights, and AVL balance of every
/// reachable production.
ValidationReport validate(const AvlGrammar& g);

// Dump format: "id T <symbol>" or "id B <left> <right>" per line, children
// before parents, then "root <id>". Reachable productions only, renumbered
// from 0. Symbols are decimal ids.
std::string dump(const AvlGrammar& g);

/// Parses a dump. Structural problems (unknown ids, cycles, duplicate ids)
/// throw GrammarError; balance is left to validate().
AvlGrammar load(std::string_view text);

} // namespace lzcomm::avl
