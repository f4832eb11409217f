#include "doctest.h"
#include "test_support.hpp"

#include "lzcomm/avl_constants.hpp"
#include "lzcomm/avl_grammar.hpp"
#include "lzcomm/error.hpp"
#include "lzcomm/factorization.hpp"

#include <algorithm>
#include <cmath>

using namespace lzcomm;
using lzcomm::testing::random_string;
using lzcomm::testing::text;

namespace {

double clog2(double x) { return std::ceil(std::log2(x)); }

void require_valid(const avl::AvlGrammar& g)
{
    const auto report = avl::validate(g);
    if (!report.ok()) FAIL(report.violations.front());
}

} // namespace

TEST_CASE("single letter")
{
    const auto g = avl::build(text("a"));
    CHECK(g.size() == 1);
    CHECK(g.height() == 1);
    CHECK(avl::expand(g) == text("a"));
}

TEST_CASE("empty string has no grammar")
{
    CHECK_THROWS_AS(avl::build(SymbolString{}), GrammarError);
    const avl::AvlGrammar e;
    CHECK(e.empty());
    CHECK(e.size() == 0);
    CHECK(avl::expand(e).empty());
}

TEST_CASE("worked example round trip and size bound")
{
    const auto s = text("abaababaabaabaabaabaabb");
    const auto g = avl::build(s);
    CHECK(avl::expand(g) == s);
    require_valid(g);
    CHECK(static_cast<double>(g.size()) <= avl::kCBuild * 8 * clog2(24));
}

TEST_CASE("random build round trips")
{
    std::mt19937_64 rng(11);
    for (int t = 0; t < 500; ++t) {
        const auto s = random_string(rng, 1 + rng() % 200, 1 + rng() % 5);
        const auto g = avl::build(s);
        REQUIRE(avl::expand(g) == s);
        require_valid(g);
        const double bound = avl::kCBuild * static_cast<double>(factorize_cn(s).size()) *
                             std::max(1.0, clog2(static_cast<double>(s.size()) + 1));
        CHECK(static_cast<double>(g.size()) <= bound);
    }
}

TEST_CASE("concat")
{
    const auto ab = avl::concat(avl::build(text("a")), avl::build(text("b")));
    CHECK(avl::expand(ab) == text("ab"));
    CHECK(static_cast<double>(ab.size()) <= 3 + avl::kCCat);

    std::mt19937_64 rng(12);
    for (int t = 0; t < 200; ++t) {
        const auto x = random_string(rng, 1 + rng() % 300, 1 + rng() % 4);
        const auto y = random_string(rng, 1 + rng() % 300, 1 + rng() % 4);
        const auto gx = avl::build(x);
        const auto gy = avl::build(y);
        const auto g = avl::concat(gx, gy);
        std::vector<Symbol> xy(x.begin(), x.end());
        xy.insert(xy.end(), y.begin(), y.end());
        REQUIRE(avl::expand(g) == SymbolString(xy));
        require_valid(g);
        const double limit = static_cast<double>(gx.size() + gy.size()) +
                             avl::kCCat * (1 + std::max(gx.height(), gy.height()));
        CHECK(static_cast<double>(g.size()) <= limit);
    }
}

TEST_CASE("concat is associative on expansions")
{
    const auto a = avl::build(text("abra"));
    const auto b = avl::build(text("cad"));
    const auto c = avl::build(text("abra"));
    const auto left = avl::concat(avl::concat(a, b), c);
    const auto right = avl::concat(a, avl::concat(b, c));
    CHECK(avl::expand(left) == avl::expand(right));
    CHECK(avl::expand(left) == text("abracadabra"));
}

TEST_CASE("split")
{
    const auto [p, s] = avl::split(avl::build(text("ab")), 2);
    CHECK(avl::expand(p) == text("a"));
    CHECK(avl::expand(s) == text("b"));

    const auto g = avl::build(text("abc"));
    const auto [e, whole] = avl::split(g, 1);
    CHECK(e.empty());
    CHECK(whole.root() == g.root());
    CHECK_THROWS_AS(avl::split(g, 0), GrammarError);
    CHECK_THROWS_AS(avl::split(g, 4), GrammarError);
}

TEST_CASE("split matches substrings at every position")
{
    std::mt19937_64 rng(13);
    for (int t = 0; t < 100; ++t) {
        const auto s = random_string(rng, 2 + rng() % 120, 1 + rng() % 4);
        const auto g = avl::build(s);
        const double logn = std::max(1.0, clog2(static_cast<double>(s.size())));
        for (std::size_t i = 1; i <= s.size(); ++i) {
            const auto [pre, suf] = avl::split(g, i);
            REQUIRE(avl::expand(suf) == s.suffix(i - 1));
            REQUIRE(avl::expand(pre) == s.prefix(i - 1));
            require_valid(suf);
            require_valid(pre);
            CHECK(static_cast<double>(suf.size()) <= static_cast<double>(g.size()) + avl::kCSplit * logn);
        }
    }
}

TEST_CASE("expand_range")
{
    std::mt19937_64 rng(14);
    for (int t = 0; t < 50; ++t) {
        const auto s = random_string(rng, 1 + rng() % 100, 3);
        const auto g = avl::build(s);
        CHECK(avl::expand_range(g, 1, s.size()) == avl::expand(g));
        for (std::size_t i = 1; i <= s.size(); ++i) {
            REQUIRE(avl::expand_range(g, i, i).size() == 1);
            REQUIRE(avl::expand_range(g, i, i)[0] == s[i - 1]);
        }
        const std::size_t i = 1 + rng() % s.size();
        const std::size_t j = i + rng() % (s.size() - i + 1);
        const std::vector<Symbol> want(s.begin() + static_cast<long>(i) - 1, s.begin() + static_cast<long>(j));
        CHECK(avl::expand_range(g, i, j) == SymbolString(want));
        CHECK(avl::expand(avl::extract(g, i, j)) == SymbolString(want));
    }
    const auto g = avl::build(text("abc"));
    CHECK_THROWS_AS(avl::expand_range(g, 2, 1), GrammarError);
    CHECK_THROWS_AS(avl::extract(g, 1, 4), GrammarError);
}

TEST_CASE("validate catches a corrupted height")
{
    const auto g = avl::build(text("abaababaabaabaabaabaabb"));
    require_valid(g);
    g.pool()->corrupt_height(*g.root(), 99);
    const auto report = avl::validate(g);
    REQUIRE_FALSE(report.ok());
    bool named = false;
    for (const auto& v : report.violations) named = named || v.find("height") != std::string::npos;
    CHECK(named);
}

TEST_CASE("validate catches imbalance")
{
    auto pool = std::make_shared<avl::ProductionPool>();
    const auto a = pool->terminal('a');
    auto t = a;
    for (int k = 0; k < 3; ++k) t = pool->binary(t, a);
    const avl::AvlGrammar g(pool, t);
    const auto report = avl::validate(g);
    CHECK_FALSE(report.ok());
    CHECK(report.violations.front().find("balance") != std::string::npos);
}

TEST_CASE("random concat/split sequences stay valid")
{
    std::mt19937_64 rng(15);
    for (int t = 0; t < 100; ++t) {
        auto s = random_string(rng, 1 + rng() % 80, 3);
        std::vector<Symbol> ref(s.begin(), s.end());
        auto g = avl::build(s);
        for (int step = 0; step < 20; ++step) {
            if (rng() % 2 == 0 || ref.size() < 2) {
                const auto x = random_string(rng, 1 + rng() % 40, 3);
                const bool front = rng() % 2 == 0;
                const auto gx = avl::build(x);
                g = front ? avl::concat(gx, g) : avl::concat(g, gx);
                ref.insert(front ? ref.begin() : ref.end(), x.begin(), x.end());
            } else {
                const std::size_t i = 2 + rng() % (ref.size() - 1);
                auto [pre, suf] = avl::split(g, i);
                if (rng() % 2 == 0) {
                    g = pre;
                    ref.resize(i - 1);
                } else {
                    g = suf;
                    ref.erase(ref.begin(), ref.begin() + static_cast<long>(i) - 1);
                }
            }
            require_valid(g);
            REQUIRE(avl::expand(g) == SymbolString(ref));
        }
    }
}

TEST_CASE("size counts reachable productions under sharing")
{
    const auto g = avl::build(text("abaababaabaabaabaabaabb"));
    const std::size_t pool_before = g.pool()->size();
    const auto [pre, suf] = avl::split(g, 10);
    CHECK(g.pool() == suf.pool());
    CHECK(g.pool()->size() > pool_before);
    // Recount through a dump, which lists reachable productions only.
    for (const auto* h : {&g, &pre, &suf}) {
        const std::string d = avl::dump(*h);
        const auto lines = static_cast<std::size_t>(std::count(d.begin(), d.end(), '\n'));
        CHECK(lines - 1 == h->size());
    }
}

TEST_CASE("dump and load")
{
    const auto g = avl::build(text("abaababaabaabaabaabaabb"));
    const std::string d = avl::dump(g);
    const auto h = avl::load(d);
    CHECK(avl::expand(h) == avl::expand(g));
    CHECK(h.size() == g.size());
    CHECK(avl::dump(h) == d);
    require_valid(h);

    CHECK(avl::dump(avl::AvlGrammar{}) == "root empty\n");
    CHECK(avl::load("root empty\n").empty());

    CHECK(avl::load("0 T 97\n1 T 98\n2 B 0 1\nroot 2\n").length() == 2);
    CHECK_THROWS_AS(avl::load("0 T 97\n"), GrammarError);
    CHECK_THROWS_AS(avl::load("0 B 1 1\nroot 0\n"), GrammarError);
    CHECK_THROWS_AS(avl::load("0 B 1 2\n1 T 97\n2 B 0 1\nroot 2\n"), GrammarError);
    CHECK_THROWS_AS(avl::load("0 T 97\n0 T 98\nroot 0\n"), GrammarError);
    CHECK_THROWS_AS(avl::load("0 X 97\nroot 0\n"), GrammarError);
    // Balance problems load fine and are reported by validate.
    const auto skew = avl::load("0 T 97\n1 B 0 0\n2 B 1 0\n3 B 2 0\nroot 3\n");
    CHECK_FALSE(avl::validate(skew).ok());
}

TEST_CASE("suffix chain zn <= cn <= avl")
{
    std::mt19937_64 rng(16);
    for (int t = 0; t < 30; ++t) {
        const auto s = random_string(rng, 2 + rng() % 400, 1 + rng() % 4);
        const auto g = avl::build(s);
        for (int k = 0; k < 20; ++k) {
            const std::size_t i = 1 + rng() % s.size();
            const auto suf = s.suffix(i - 1);
            const auto zn = factorize_lzn(suf).size();
            const auto cn = factorize_cn(suf).size();
            const auto a = avl::split(g, i).second.size();
            CHECK(zn <= cn);
            CHECK(cn <= a);
        }
    }
}

TEST_CASE("unary strings")
{
    for (std::size_t n : {1u, 2u, 3u, 7u, 64u, 1000u}) {
        const SymbolString s(std::vector<Symbol>(n, 'a'));
        const auto g = avl::build(s);
        CHECK(avl::expand(g) == s);
        require_valid(g);
    }
}
