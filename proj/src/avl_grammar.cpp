#include "lzcomm/avl_grammar.hpp"

#include "lzcomm/error.hpp"
#include "lzcomm/factorization.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

namespace lzcomm::avl {

ProductionId ProductionPool::terminal(Symbol s)
{
    if (auto it = terminals_.find(s); it != terminals_.end()) return it->second;
    Production p;
    p.kind = Production::Kind::Terminal;
    p.symbol = s;
    const ProductionId id = push_unchecked(p);
    terminals_.emplace(s, id);
    return id;
}

ProductionId ProductionPool::binary(ProductionId left, ProductionId right)
{
    const Production& l = productions_[left];
    const Production& r = productions_[right];
    Production p;
    p.kind = Production::Kind::Binary;
    p.left = left;
    p.right = right;
    p.length = l.length + r.length;
    p.height = 1 + std::max(l.height, r.height);
    return push_unchecked(p);
}

ProductionId ProductionPool::push_unchecked(const Production& p)
{
    productions_.push_back(p);
    return static_cast<ProductionId>(productions_.size() - 1);
}

std::uint64_t AvlGrammar::length() const { return root_ ? (*pool_)[*root_].length : 0; }
std::uint32_t AvlGrammar::height() const { return root_ ? (*pool_)[*root_].height : 0; }

std::size_t AvlGrammar::size() const
{
    if (!root_) return 0;
    const ProductionPool& pool = *pool_;
    std::vector<char> seen(pool.size(), 0);
    std::vector<ProductionId> stack{*root_};
    std::size_t count = 0;
    while (!stack.empty()) {
        const ProductionId id = stack.back();
        stack.pop_back();
        if (seen[id]) continue;
        seen[id] = 1;
        ++count;
        const Production& p = pool[id];
        if (p.kind == Production::Kind::Binary) {
            stack.push_back(p.left);
            stack.push_back(p.right);
        }
    }
    return count;
}

namespace {

// Persistent AVL join and range extraction over one pool. Each rotation is
// folded into the node construction so no intermediate production is minted.
class Editor {
public:
    explicit Editor(ProductionPool& pool) : pool_(pool) {}

    std::uint32_t h(ProductionId id) const { return pool_[id].height; }
    std::uint64_t len(ProductionId id) const { return pool_[id].length; }
    ProductionId left(ProductionId id) const { return pool_[id].left; }
    ProductionId right(ProductionId id) const { return pool_[id].right; }
    ProductionId node(ProductionId l, ProductionId r) { return pool_.binary(l, r); }

    ProductionId join(ProductionId a, ProductionId b)
    {
        if (h(a) > h(b) + 1) return join_right(a, b);
        if (h(b) > h(a) + 1) return join_left(a, b);
        return node(a, b);
    }

    std::optional<ProductionId> join(std::optional<ProductionId> a, std::optional<ProductionId> b)
    {
        if (!a) return b;
        if (!b) return a;
        return join(*a, *b);
    }

    // S[1..j] of the node, 1 <= j <= len.
    ProductionId prefix(ProductionId id, std::uint64_t j)
    {
        if (j == len(id)) return id;
        const ProductionId l = left(id);
        if (j <= len(l)) return prefix(l, j);
        return join(l, prefix(right(id), j - len(l)));
    }

    // S[i..len] of the node, 1 <= i <= len.
    ProductionId suffix(ProductionId id, std::uint64_t i)
    {
        if (i == 1) return id;
        const ProductionId l = left(id);
        if (i > len(l)) return suffix(right(id), i - len(l));
        return join(suffix(l, i), right(id));
    }

    // S[i..j] of the node, 1 <= i <= j <= len.
    ProductionId range(ProductionId id, std::uint64_t i, std::uint64_t j)
    {
        if (i == 1 && j == len(id)) return id;
        const ProductionId l = left(id);
        const std::uint64_t ll = len(l);
        if (j <= ll) return range(l, i, j);
        if (i > ll) return range(right(id), i - ll, j - ll);
        return join(suffix(l, i), prefix(right(id), j - ll));
    }

private:
    // h(a) > h(b) + 1
    ProductionId join_right(ProductionId a, ProductionId b)
    {
        const ProductionId l = left(a);
        const ProductionId c = right(a);
        if (h(c) <= h(b) + 1) {
            const std::uint32_t ht = std::max(h(c), h(b)) + 1;
            if (ht <= h(l) + 1) return node(l, node(c, b));
            return node(node(l, left(c)), node(right(c), b));
        }
        const ProductionId t = join_right(c, b);
        if (h(t) <= h(l) + 1) return node(l, t);
        return node(node(l, left(t)), right(t));
    }

    // h(b) > h(a) + 1
    ProductionId join_left(ProductionId a, ProductionId b)
    {
        const ProductionId c = left(b);
        const ProductionId r = right(b);
        if (h(c) <= h(a) + 1) {
            const std::uint32_t ht = std::max(h(a), h(c)) + 1;
            if (ht <= h(r) + 1) return node(node(a, c), r);
            return node(node(a, left(c)), node(right(c), r));
        }
        const ProductionId t = join_left(a, c);
        if (h(t) <= h(r) + 1) return node(t, r);
        return node(left(t), node(right(t), r));
    }

    ProductionPool& pool_;
};

ProductionId copy_into(ProductionPool& dst, const ProductionPool& src, ProductionId root,
                       std::unordered_map<ProductionId, ProductionId>& memo)
{
    if (auto it = memo.find(root); it != memo.end()) return it->second;
    const Production& p = src[root];
    ProductionId id = 0;
    if (p.kind == Production::Kind::Terminal) {
        id = dst.terminal(p.symbol);
    } else {
        const ProductionId l = copy_into(dst, src, p.left, memo);
        const ProductionId r = copy_into(dst, src, p.right, memo);
        id = dst.binary(l, r);
    }
    memo.emplace(root, id);
    return id;
}

void expand_into(const ProductionPool& pool, ProductionId root, std::vector<Symbol>& out)
{
    std::vector<ProductionId> stack{root};
    while (!stack.empty()) {
        const ProductionId id = stack.back();
        stack.pop_back();
        const Production& p = pool[id];
        if (p.kind == Production::Kind::Terminal) {
            out.push_back(p.symbol);
        } else {
            stack.push_back(p.right);
            stack.push_back(p.left);
        }
    }
}

} // namespace

AvlGrammar build(std::span<const Symbol> s)
{
    if (s.empty()) throw GrammarError("cannot build a CNF grammar for the empty string");
    auto pool = std::make_shared<ProductionPool>();
    Editor ed(*pool);
    std::optional<ProductionId> acc;
    for (const Factor& f : factorize_cn(s)) {
        const ProductionId piece =
            f.fresh() ? pool->terminal(f.last) : ed.range(*acc, f.source, f.source + f.length - 1);
        acc = acc ? ed.join(*acc, piece) : piece;
    }
    return AvlGrammar(pool, acc);
}

AvlGrammar concat(const AvlGrammar& a, const AvlGrammar& b)
{
    if (a.empty()) return b;
    if (b.empty()) return a;
    const auto& pool = a.pool();
    ProductionId rb = *b.root();
    if (b.pool() != pool) {
        std::unordered_map<ProductionId, ProductionId> memo;
        rb = copy_into(*pool, *b.pool(), rb, memo);
    }
    Editor ed(*pool);
    return AvlGrammar(pool, ed.join(*a.root(), rb));
}

std::pair<AvlGrammar, AvlGrammar> split(const AvlGrammar& g, std::uint64_t i)
{
    if (i < 1 || i > g.length()) {
        throw GrammarError("split point " + std::to_string(i) + " outside [1, " + std::to_string(g.length()) + "]");
    }
    if (i == 1) return {AvlGrammar(g.pool(), std::nullopt), g};
    Editor ed(*g.pool());
    const ProductionId root = *g.root();
    const ProductionId pre = ed.prefix(root, i - 1);
    const ProductionId suf = ed.suffix(root, i);
    return {AvlGrammar(g.pool(), pre), AvlGrammar(g.pool(), suf)};
}

AvlGrammar extract(const AvlGrammar& g, std::uint64_t i, std::uint64_t j)
{
    if (i < 1 || j < i || j > g.length()) {
        throw GrammarError("range [" + std::to_string(i) + ", " + std::to_string(j) + "] outside [1, " +
                           std::to_string(g.length()) + "]");
    }
    Editor ed(*g.pool());
    return AvlGrammar(g.pool(), ed.range(*g.root(), i, j));
}

SymbolString expand(const AvlGrammar& g)
{
    std::vector<Symbol> out;
    if (g.empty()) return SymbolString{};
    out.reserve(g.length());
    expand_into(*g.pool(), *g.root(), out);
    return SymbolString(std::move(out));
}

SymbolString expand_range(const AvlGrammar& g, std::uint64_t i, std::uint64_t j)
{
    if (i < 1 || j < i || j > g.length()) {
        throw GrammarError("range [" + std::to_string(i) + ", " + std::to_string(j) + "] outside [1, " +
                           std::to_string(g.length()) + "]");
    }
    // Walk down without minting productions: collect covering nodes.
    const ProductionPool& pool = *g.pool();
    std::vector<Symbol> out;
    out.reserve(j - i + 1);
    struct Frame {
        ProductionId id;
        std::uint64_t lo, hi; // requested range within the node, 1-based
    };
    std::vector<Frame> stack{{*g.root(), i, j}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const Production& p = pool[f.id];
        if (f.lo == 1 && f.hi == p.length) {
            expand_into(pool, f.id, out);
            continue;
        }
        const std::uint64_t ll = pool[p.left].length;
        if (f.hi > ll) stack.push_back({p.right, f.lo > ll ? f.lo - ll : 1, f.hi - ll});
        if (f.lo <= ll) stack.push_back({p.left, f.lo, std::min(f.hi, ll)});
    }
    return SymbolString(std::move(out));
}

ValidationReport validate(const AvlGrammar& g)
{
    ValidationReport report;
    if (g.empty()) return report;
    const ProductionPool& pool = *g.pool();
    std::vector<char> seen(pool.size(), 0);
    std::vector<ProductionId> stack{*g.root()};
    auto violation = [&](ProductionId id, const std::string& what) {
        report.violations.push_back("production " + std::to_string(id) + ": " + what);
    };
    while (!stack.empty()) {
        const ProductionId id = stack.back();
        stack.pop_back();
        if (seen[id]) continue;
        seen[id] = 1;
        const Production& p = pool[id];
        if (p.kind == Production::Kind::Terminal) {
            if (p.length != 1) violation(id, "terminal length " + std::to_string(p.length) + " != 1");
            if (p.height != 1) violation(id, "terminal height " + std::to_string(p.height) + " != 1");
            continue;
        }
        if (p.left >= id || p.right >= id) {
            violation(id, "child id not smaller than parent (possible cycle)");
            continue;
        }
        const Production& l = pool[p.left];
        const Production& r = pool[p.right];
        if (p.length != l.length + r.length) violation(id, "cached length mismatch");
        if (p.height != 1 + std::max(l.height, r.height)) violation(id, "cached height mismatch");
        const auto diff = static_cast<std::int64_t>(l.height) - static_cast<std::int64_t>(r.height);
        if (diff > 1 || diff < -1) violation(id, "AVL balance violated (heights " + std::to_string(l.height) + ", " +
                                                     std::to_string(r.height) + ")");
        stack.push_back(p.left);
        stack.push_back(p.right);
    }
    const Production& root = pool[*g.root()];
    const double bound = 1.45 * std::log2(static_cast<double>(root.length) + 2.0) + 2.0;
    if (static_cast<double>(root.height) > bound) {
        violation(*g.root(), "height " + std::to_string(root.height) + " exceeds AVL bound");
    }
    return report;
}

std::string dump(const AvlGrammar& g)
{
    if (g.empty()) return "root empty\n";
    const ProductionPool& pool = *g.pool();
    std::unordered_map<ProductionId, std::uint64_t> number;
    std::string out;
    // Post-order so children precede parents.
    std::vector<std::pair<ProductionId, bool>> stack{{*g.root(), false}};
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        stack.pop_back();
        if (number.count(id)) continue;
        const Production& p = pool[id];
        if (p.kind == Production::Kind::Binary && !expanded) {
            stack.push_back({id, true});
            stack.push_back({p.right, false});
            stack.push_back({p.left, false});
            continue;
        }
        const std::uint64_t k = number.size();
        number.emplace(id, k);
        out += std::to_string(k);
        if (p.kind == Production::Kind::Terminal) {
            out += " T " + std::to_string(p.symbol) + "\n";
        } else {
            out += " B " + std::to_string(number.at(p.left)) + " " + std::to_string(number.at(p.right)) + "\n";
        }
    }
    out += "root " + std::to_string(number.at(*g.root())) + "\n";
    return out;
}

namespace {

std::uint64_t parse_id(std::string_view token, std::size_t line)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw GrammarError("line " + std::to_string(line) + ": bad number '" + std::string(token) + "'");
    }
    return v;
}

std::vector<std::string_view> words(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace

AvlGrammar load(std::string_view text)
{
    struct Raw {
        bool terminal;
        std::uint64_t a, b;
    };
    std::unordered_map<std::uint64_t, Raw> raw;
    std::optional<std::uint64_t> root;
    bool empty_root = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t e = text.find('\n', pos);
        std::string_view line = text.substr(pos, e == std::string_view::npos ? std::string_view::npos : e - pos);
        pos = e == std::string_view::npos ? text.size() : e + 1;
        ++line_no;
        auto w = words(line);
        if (w.empty()) continue;
        if (w[0] == "root") {
            if (w.size() != 2) throw GrammarError("line " + std::to_string(line_no) + ": expected 'root <id>'");
            if (w[1] == "empty") empty_root = true;
            else root = parse_id(w[1], line_no);
            continue;
        }
        const std::uint64_t id = parse_id(w[0], line_no);
        Raw r{};
        if (w.size() == 3 && w[1] == "T") {
            r = {true, parse_id(w[2], line_no), 0};
            if (r.a > 0xFFFFFFFFull) throw GrammarError("line " + std::to_string(line_no) + ": symbol out of range");
        } else if (w.size() == 4 && w[1] == "B") {
            r = {false, parse_id(w[2], line_no), parse_id(w[3], line_no)};
        } else {
            throw GrammarError("line " + std::to_string(line_no) + ": expected 'id T sym' or 'id B left right'");
        }
        if (!raw.emplace(id, r).second) throw GrammarError("duplicate production id " + std::to_string(id));
    }
    if (empty_root) return AvlGrammar(std::make_shared<ProductionPool>(), std::nullopt);
    if (!root) throw GrammarError("missing 'root' line");
    if (!raw.count(*root)) throw GrammarError("root id " + std::to_string(*root) + " is not defined");

    auto pool = std::make_shared<ProductionPool>();
    std::unordered_map<std::uint64_t, ProductionId> placed;
    std::unordered_map<std::uint64_t, char> state; // 1 = on stack, 2 = done
    std::vector<std::pair<std::uint64_t, bool>> stack{{*root, false}};
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        stack.pop_back();
        auto it = raw.find(id);
        if (it == raw.end()) throw GrammarError("reference to undefined production " + std::to_string(id));
        const Raw& r = it->second;
        if (state[id] == 2) continue;
        if (r.terminal) {
            placed[id] = pool->terminal(static_cast<Symbol>(r.a));
            state[id] = 2;
            continue;
        }
        if (!expanded) {
            if (state[id] == 1) throw GrammarError("cycle through production " + std::to_string(id));
            state[id] = 1;
            stack.push_back({id, true});
            for (std::uint64_t child : {r.b, r.a}) {
                if (!raw.count(child)) throw GrammarError("reference to undefined production " + std::to_string(child));
                if (state[child] == 1) throw GrammarError("cycle through production " + std::to_string(child));
                if (state[child] != 2) stack.push_back({child, false});
            }
            continue;
        }
        placed[id] = pool->binary(placed.at(r.a), placed.at(r.b));
        state[id] = 2;
    }
    return AvlGrammar(pool, placed.at(*root));
}

} // namespace lzcomm::avl
