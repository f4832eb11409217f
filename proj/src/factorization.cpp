#include "lzcomm/factorization.hpp"

#include "lzcomm/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>

namespace lzcomm {

std::string_view mode_name(Mode mode) noexcept
{
    switch (mode) {
    case Mode::LZN: return "LZN";
    case Mode::LZS: return "LZS";
    case Mode::CN: return "CN";
    }
    return "?";
}

Mode parse_mode(std::string_view name)
{
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "LZN") return Mode::LZN;
    if (upper == "LZS") return Mode::LZS;
    if (upper == "CN") return Mode::CN;
    throw FormatError("unknown mode '" + std::string(name) + "' (expected LZN|LZS|CN)");
}

Factorization::Factorization(Mode mode, std::vector<Factor> factors)
    : mode_(mode), factors_(std::move(factors))
{
    for (const auto& f : factors_) original_length_ += f.length;
}

std::vector<std::size_t> Factorization::start_positions() const
{
    std::vector<std::size_t> starts;
    starts.reserve(factors_.size());
    std::size_t pos = 1;
    for (const auto& f : factors_) {
        starts.push_back(pos);
        pos += f.length;
    }
    return starts;
}

// Online suffix automaton over the already-parsed prefix. Every state keeps
// the end of its first occurrence, which gives the leftmost source of a match.
struct GreedyParser::Automaton {
    struct State {
        std::int32_t len;
        std::int32_t link;
        std::int32_t first_end;
        std::int32_t edges;
    };
    struct Edge {
        Symbol symbol;
        std::int32_t to;
        std::int32_t next;
    };

    std::vector<State> states;
    std::vector<Edge> edges;
    std::int32_t last = 0;
    std::int32_t length = 0;

    Automaton() { states.push_back({0, -1, -1, -1}); }

    std::int32_t find(std::int32_t st, Symbol c) const
    {
        for (std::int32_t e = states[st].edges; e != -1; e = edges[e].next) {
            if (edges[e].symbol == c) return edges[e].to;
        }
        return -1;
    }

    void set(std::int32_t st, Symbol c, std::int32_t to)
    {
        for (std::int32_t e = states[st].edges; e != -1; e = edges[e].next) {
            if (edges[e].symbol == c) {
                edges[e].to = to;
                return;
            }
        }
        edges.push_back({c, to, states[st].edges});
        states[st].edges = static_cast<std::int32_t>(edges.size() - 1);
    }

    void extend(Symbol c)
    {
        const std::int32_t pos = length++;
        const auto cur = static_cast<std::int32_t>(states.size());
        states.push_back({states[last].len + 1, 0, pos, -1});
        std::int32_t p = last;
        while (p != -1 && find(p, c) == -1) {
            set(p, c, cur);
            p = states[p].link;
        }
        if (p != -1) {
            const std::int32_t q = find(p, c);
            if (states[p].len + 1 == states[q].len) {
                states[cur].link = q;
            } else {
                const auto clone = static_cast<std::int32_t>(states.size());
                states.push_back({states[p].len + 1, states[q].link, states[q].first_end, -1});
                for (std::int32_t e = states[q].edges; e != -1; e = edges[e].next) {
                    const Edge copy = edges[e];
                    edges.push_back({copy.symbol, copy.to, states[clone].edges});
                    states[clone].edges = static_cast<std::int32_t>(edges.size() - 1);
                }
                while (p != -1 && find(p, c) == q) {
                    set(p, c, clone);
                    p = states[p].link;
                }
                states[q].link = clone;
                states[cur].link = clone;
            }
        }
        last = cur;
    }
};

GreedyParser::GreedyParser(std::span<const Symbol> text, Mode mode)
    : text_(text), mode_(mode), automaton_(std::make_unique<Automaton>())
{
    if (mode == Mode::LZS) {
        throw Error("GreedyParser handles only the non self-referencing modes");
    }
    automaton_->states.reserve(2 * std::min<std::size_t>(text.size(), 1u << 16) + 2);
}

GreedyParser::~GreedyParser() = default;
GreedyParser::GreedyParser(GreedyParser&&) noexcept = default;
GreedyParser& GreedyParser::operator=(GreedyParser&&) noexcept = default;

std::optional<Factor> GreedyParser::next()
{
    const std::size_t n = text_.size();
    if (pos_ >= n) return std::nullopt;

    const std::size_t u = pos_;
    std::int32_t st = 0;
    std::size_t m = 0;
    while (u + m < n) {
        const std::int32_t nx = automaton_->find(st, text_[u + m]);
        if (nx < 0) break;
        st = nx;
        ++m;
    }

    Factor f;
    if (m == 0) {
        f = {0, 1, text_[u], false};
    } else {
        const std::size_t source = static_cast<std::size_t>(automaton_->states[st].first_end) + 2 - m;
        if (mode_ == Mode::CN) {
            f = {source, m, text_[u + m - 1], false};
        } else if (u + m == n) {
            f = {source, m, text_[n - 1], true};
        } else {
            f = {source, m + 1, text_[u + m], false};
        }
    }
    for (std::size_t i = u; i < u + f.length; ++i) automaton_->extend(text_[i]);
    pos_ += f.length;
    return f;
}

namespace {

Factorization drain(std::span<const Symbol> s, Mode mode)
{
    GreedyParser parser(s, mode);
    std::vector<Factor> factors;
    while (auto f = parser.next()) factors.push_back(*f);
    return Factorization(mode, std::move(factors));
}

// Longest previous occurrence (possibly overlapping) of s[v..] starting
// before v, via a Z-scan of s[v..] # s. Returns (length, 0-based source).
std::pair<std::size_t, std::size_t> longest_previous_overlapping(std::span<const Symbol> s, std::size_t v)
{
    const std::size_t n = s.size();
    const std::size_t plen = n - v;
    const std::size_t total = plen + 1 + n;
    auto at = [&](std::size_t i) -> std::int64_t {
        if (i < plen) return s[v + i];
        if (i == plen) return -1;
        return s[i - plen - 1];
    };
    std::vector<std::size_t> z(total, 0);
    std::size_t l = 0, r = 0;
    std::size_t best = 0, best_src = 0;
    const std::size_t last_needed = plen + v; // text offset v-1
    for (std::size_t i = 1; i <= last_needed; ++i) {
        std::size_t k = 0;
        if (i < r) k = std::min(r - i, z[i - l]);
        while (i + k < total && at(k) == at(i + k)) ++k;
        z[i] = k;
        if (i + k > r) {
            l = i;
            r = i + k;
        }
        if (i > plen && k > best) {
            best = k;
            best_src = i - plen - 1;
        }
    }
    return {best, best_src};
}

} // namespace

Factorization factorize_lzn(std::span<const Symbol> s) { return drain(s, Mode::LZN); }
Factorization factorize_cn(std::span<const Symbol> s) { return drain(s, Mode::CN); }

Factorization factorize_lzs(std::span<const Symbol> s)
{
    std::vector<Factor> factors;
    const std::size_t n = s.size();
    std::size_t v = 0;
    while (v < n) {
        auto [m, src] = v == 0 ? std::pair<std::size_t, std::size_t>{0, 0} : longest_previous_overlapping(s, v);
        if (m == 0) {
            factors.push_back({0, 1, s[v], false});
            v += 1;
        } else if (v + m == n) {
            factors.push_back({src + 1, m, s[n - 1], true});
            v = n;
        } else {
            factors.push_back({src + 1, m + 1, s[v + m], false});
            v += m + 1;
        }
    }
    return Factorization(Mode::LZS, std::move(factors));
}

Factorization factorize(std::span<const Symbol> s, Mode mode)
{
    switch (mode) {
    case Mode::LZN: return factorize_lzn(s);
    case Mode::LZS: return factorize_lzs(s);
    case Mode::CN: return factorize_cn(s);
    }
    throw Error("unknown mode");
}

SymbolString decompress(const Factorization& f)
{
    std::vector<Symbol> out;
    out.reserve(f.original_length());
    const Mode mode = f.mode();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Factor& x = f[i];
        const std::size_t start = out.size() + 1; // 1-based
        if (x.length == 0) throw MalformedFactorization(i, "zero length");
        if (x.truncated && (mode == Mode::CN || i + 1 != f.size())) {
            throw MalformedFactorization(i, "truncated flag only allowed on the final LZN/LZS factor");
        }
        if (x.fresh()) {
            if (x.length != 1 || x.truncated) throw MalformedFactorization(i, "fresh letter must have length 1");
            out.push_back(x.last);
            continue;
        }
        if (x.source >= start) throw MalformedFactorization(i, "source does not precede the factor");

        const bool pure_copy = mode == Mode::CN || x.truncated;
        const std::size_t copy_len = pure_copy ? x.length : x.length - 1;
        if (copy_len == 0) throw MalformedFactorization(i, "referencing factor copies nothing");
        if (mode != Mode::LZS && x.source + copy_len - 1 >= start) {
            throw MalformedFactorization(i, "reference overlaps the factor");
        }
        for (std::size_t k = 0; k < copy_len; ++k) out.push_back(out[x.source - 1 + k]);
        if (pure_copy) {
            if (out.back() != x.last) throw MalformedFactorization(i, "last symbol disagrees with the copied reference");
        } else {
            out.push_back(x.last);
        }
    }
    return SymbolString(std::move(out));
}

void require_canonical(const Factorization& f)
{
    const SymbolString s = decompress(f);
    const Factorization canonical = factorize(s, f.mode());
    const std::size_t common = std::min(canonical.size(), f.size());
    for (std::size_t i = 0; i < common; ++i) {
        if (!(canonical[i] == f[i])) throw MalformedFactorization(i, "not the canonical greedy leftmost factor");
    }
    if (canonical.size() != f.size()) throw MalformedFactorization(common, "not the canonical greedy factorization");
}

std::size_t lcp(std::span<const Symbol> x, std::span<const Symbol> y) noexcept
{
    const std::size_t m = std::min(x.size(), y.size());
    std::size_t i = 0;
    while (i < m && x[i] == y[i]) ++i;
    return i;
}

HammingResult hamming_oracle(std::span<const Symbol> x, std::span<const Symbol> y)
{
    if (x.size() != y.size()) {
        throw Error("hamming distance needs equal lengths (" + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
    }
    HammingResult r;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != y[i]) r.positions.push_back(i + 1);
    }
    r.distance = r.positions.size();
    return r;
}

std::pair<SymbolString, SymbolString> wrap_sentinels(std::span<const Symbol> a, std::span<const Symbol> b)
{
    std::vector<Symbol> wa, wb;
    wa.reserve(a.size() + 2);
    wb.reserve(b.size() + 2);
    wa.push_back(kHashSentinel);
    wa.insert(wa.end(), a.begin(), a.end());
    wa.push_back(kDollarSentinel);
    wb.push_back(kDollarSentinel);
    wb.insert(wb.end(), b.begin(), b.end());
    wb.push_back(kHashSentinel);
    return {SymbolString(std::move(wa)), SymbolString(std::move(wb))};
}

namespace {

std::string escape_symbol(Symbol s)
{
    switch (s) {
    case '\t': return "\\t";
    case '\n': return "\\n";
    case '\r': return "\\r";
    case ' ': return "\\s";
    case '\\': return "\\\\";
    case kHashSentinel: return "\\#";
    case kDollarSentinel: return "\\$";
    default: break;
    }
    if (s < 0x20 || s == 0x7F || s > 0x10FFFF || (s >= 0xD800 && s <= 0xDFFF)) {
        char buf[24];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), s, 16);
        return "\\u{" + std::string(buf, ptr) + "}";
    }
    std::string out;
    append_utf8(out, s);
    return out;
}

Symbol unescape_symbol(std::string_view token)
{
    if (token.size() >= 2 && token[0] == '\\') {
        if (token == "\\t") return '\t';
        if (token == "\\n") return '\n';
        if (token == "\\r") return '\r';
        if (token == "\\s") return ' ';
        if (token == "\\\\") return '\\';
        if (token == "\\#") return kHashSentinel;
        if (token == "\\$") return kDollarSentinel;
        if (token.size() > 4 && token.substr(0, 3) == "\\u{" && token.back() == '}') {
            std::uint32_t v = 0;
            auto body = token.substr(3, token.size() - 4);
            auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v, 16);
            if (ec == std::errc{} && ptr == body.data() + body.size()) return v;
        }
        throw FormatError("bad symbol escape '" + std::string(token) + "'");
    }
    SymbolString s = SymbolString::from_text(token);
    if (s.size() != 1) throw FormatError("expected exactly one symbol, got '" + std::string(token) + "'");
    return s[0];
}

std::string symbol_token(Symbol s, SymbolFormat format)
{
    if (format == SymbolFormat::Text) return escape_symbol(s);
    return std::to_string(s);
}

std::uint64_t parse_u64(std::string_view token, const char* what)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw FormatError(std::string("bad ") + what + " '" + std::string(token) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (true) {
        std::size_t j = line.find(sep, i);
        if (j == std::string_view::npos) {
            parts.push_back(line.substr(i));
            break;
        }
        parts.push_back(line.substr(i, j - i));
        i = j + 1;
    }
    return parts;
}

} // namespace

std::string write_factorization(const Factorization& f, SymbolFormat format)
{
    std::string out = "#mode=";
    out += mode_name(f.mode());
    out += " n=" + std::to_string(f.original_length());
    out += format == SymbolFormat::Text ? " format=text\n" : " format=ints\n";
    for (const auto& x : f) {
        out += std::to_string(x.source);
        out += '\t';
        out += std::to_string(x.length);
        out += '\t';
        out += symbol_token(x.last, format);
        if (x.truncated) out += "\tT";
        out += '\n';
    }
    return out;
}

Factorization read_factorization(std::string_view data)
{
    std::size_t line_end = data.find('\n');
    std::string_view header = data.substr(0, line_end);
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    if (header.substr(0, 6) != "#mode=") throw FormatError("factorization file must start with '#mode='");

    Mode mode = Mode::LZN;
    SymbolFormat format = SymbolFormat::Text;
    std::optional<std::uint64_t> declared_n;
    for (auto field : split(header.substr(1), ' ')) {
        if (field.empty()) continue;
        auto eq = field.find('=');
        if (eq == std::string_view::npos) throw FormatError("bad header field '" + std::string(field) + "'");
        auto key = field.substr(0, eq);
        auto value = field.substr(eq + 1);
        if (key == "mode") mode = parse_mode(value);
        else if (key == "n") declared_n = parse_u64(value, "length");
        else if (key == "format") format = parse_symbol_format(value);
        else throw FormatError("unknown header field '" + std::string(key) + "'");
    }

    std::vector<Factor> factors;
    std::size_t pos = line_end == std::string_view::npos ? data.size() : line_end + 1;
    while (pos < data.size()) {
        std::size_t e = data.find('\n', pos);
        std::string_view line = data.substr(pos, e == std::string_view::npos ? std::string_view::npos : e - pos);
        pos = e == std::string_view::npos ? data.size() : e + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto cols = split(line, '\t');
        if (cols.size() != 3 && !(cols.size() == 4 && cols[3] == "T")) {
            throw FormatError("factor line " + std::to_string(factors.size()) + " needs 3 tab-separated columns");
        }
        Factor x;
        x.source = parse_u64(cols[0], "source");
        x.length = parse_u64(cols[1], "length");
        x.last = format == SymbolFormat::Text ? unescape_symbol(cols[2])
                                              : static_cast<Symbol>(parse_u64(cols[2], "symbol"));
        x.truncated = cols.size() == 4;
        factors.push_back(x);
    }
    Factorization f(mode, std::move(factors));
    if (declared_n && *declared_n != f.original_length()) {
        throw FormatError("header says n=" + std::to_string(*declared_n) + " but factor lengths sum to " +
                          std::to_string(f.original_length()));
    }
    return f;
}

std::string render_triples(const Factorization& f, SymbolFormat format)
{
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Factor& x = f[i];
        if (i) out += ',';
        out += '(' + std::to_string(x.source) + ',' + std::to_string(x.fresh() ? 0 : x.length) + ',' +
               symbol_token(x.last, format) + ')';
    }
    return out;
}

} // namespace lzcomm
