#include "doctest.h"
#include "test_support.hpp"

#include "lzcomm/error.hpp"
#include "lzcomm/factorization.hpp"
#include "lzcomm/oracle.hpp"

using namespace lzcomm;
using lzcomm::testing::binary_string;
using lzcomm::testing::random_string;
using lzcomm::testing::text;

namespace {

constexpr std::string_view kExample = "abaababaabaabaabaabaabb";

Factor fr(std::size_t s, std::size_t len, char c, bool t = false)
{
    return Factor{s, len, static_cast<Symbol>(c), t};
}

} // namespace

TEST_CASE("LZN of the worked example")
{
    const auto f = factorize_lzn(text(kExample));
    const std::vector<Factor> expected = {fr(0, 1, 'a'), fr(0, 1, 'b'), fr(1, 2, 'a'), fr(2, 3, 'b'),
                                          fr(3, 5, 'a'), fr(7, 7, 'b'), fr(3, 4, 'b')};
    CHECK(f.factors() == expected);
    CHECK(f.size() == 7);
    CHECK(render_triples(f, SymbolFormat::Text) == "(0,0,a),(0,0,b),(1,2,a),(2,3,b),(3,5,a),(7,7,b),(3,4,b)");
}

TEST_CASE("LZS of the worked example")
{
    const auto f = factorize_lzs(text(kExample));
    REQUIRE(f.size() == 6);
    CHECK(f[5] == fr(7, 11, 'b'));
    CHECK(f[4] == fr(3, 5, 'a'));
}

TEST_CASE("CN of the worked example")
{
    const auto f = factorize_cn(text(kExample));
    const std::vector<Factor> expected = {fr(0, 1, 'a'), fr(0, 1, 'b'), fr(1, 1, 'a'), fr(1, 3, 'a'),
                                          fr(2, 5, 'a'), fr(1, 6, 'a'), fr(1, 5, 'b'), fr(2, 1, 'b')};
    CHECK(f.size() == 8);
    CHECK(f.factors() == expected);
    CHECK(factorize_cn(text("x")).size() == 1);
}

TEST_CASE("empty input yields empty factorizations")
{
    for (Mode m : {Mode::LZN, Mode::LZS, Mode::CN}) {
        const auto f = factorize(SymbolString{}, m);
        CHECK(f.empty());
        CHECK(decompress(f).empty());
    }
}

TEST_CASE("end-of-string truncation")
{
    CHECK(factorize_lzn(text("aaaa")).factors() ==
          std::vector<Factor>{fr(0, 1, 'a'), fr(1, 2, 'a'), fr(1, 1, 'a', true)});
    CHECK(factorize_lzs(text("aaaaaaaa")).factors() == std::vector<Factor>{fr(0, 1, 'a'), fr(1, 7, 'a', true)});
    CHECK(factorize_lzn(text("aaaaaaaa")).factors() ==
          std::vector<Factor>{fr(0, 1, 'a'), fr(1, 2, 'a'), fr(1, 4, 'a'), fr(1, 1, 'a', true)});
}

TEST_CASE("decompress rejects malformed references")
{
    SUBCASE("overlap in LZN")
    {
        Factorization f(Mode::LZN, {fr(0, 1, 'a'), fr(1, 3, 'b')});
        try {
            (void)decompress(f);
            FAIL("expected MalformedFactorization");
        } catch (const MalformedFactorization& e) {
            CHECK(e.factor_index() == 1);
        }
        Factorization ok(Mode::LZS, {fr(0, 1, 'a'), fr(1, 3, 'b')});
        CHECK(decompress(ok) == text("aaab"));
    }
    SUBCASE("source not before the factor")
    {
        Factorization f(Mode::LZS, {fr(0, 1, 'a'), fr(2, 2, 'b')});
        CHECK_THROWS_AS((void)decompress(f), MalformedFactorization);
    }
    SUBCASE("fresh letter with length > 1")
    {
        Factorization f(Mode::LZN, {fr(0, 2, 'a')});
        CHECK_THROWS_AS((void)decompress(f), MalformedFactorization);
    }
    SUBCASE("truncated factor in the middle")
    {
        Factorization f(Mode::LZN, {fr(0, 1, 'a'), fr(1, 1, 'a', true), fr(0, 1, 'b')});
        CHECK_THROWS_AS((void)decompress(f), MalformedFactorization);
    }
    SUBCASE("CN copy whose last symbol disagrees")
    {
        Factorization f(Mode::CN, {fr(0, 1, 'a'), fr(0, 1, 'b'), fr(1, 2, 'a')});
        CHECK_THROWS_AS((void)decompress(f), MalformedFactorization);
    }
}

TEST_CASE("decompress inverts the worked example triples")
{
    Factorization f(Mode::LZN, {fr(0, 1, 'a'), fr(0, 1, 'b'), fr(1, 2, 'a'), fr(2, 3, 'b'), fr(3, 5, 'a'),
                                fr(7, 7, 'b'), fr(3, 4, 'b')});
    CHECK(decompress(f) == text(kExample));
}

TEST_CASE("lcp and hamming basics")
{
    CHECK(lcp(text("abc"), text("abd")) == 2);
    CHECK(lcp(SymbolString{}, text("x")) == 0);
    CHECK(lcp(text(kExample), text(kExample)) == kExample.size());

    CHECK(hamming_oracle(text(kExample), text(kExample)).distance == 0);
    const auto h = hamming_oracle(text("abc"), text("abd"));
    CHECK(h.distance == 1);
    CHECK(h.positions == std::vector<std::size_t>{3});
    CHECK_THROWS_AS((void)hamming_oracle(text("ab"), text("abc")), Error);
}

TEST_CASE("sentinel wrapping")
{
    auto [a, b] = wrap_sentinels(SymbolString{}, SymbolString{});
    CHECK(a.size() == 2);
    CHECK(hamming_oracle(a, b).distance == 2);
    auto [x, y] = wrap_sentinels(text("a"), text("a"));
    CHECK(hamming_oracle(x, y).distance == 2);
    CHECK(x.has_sentinels());

    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        const auto s1 = random_string(rng, 1 + t % 40, 3);
        const auto s2 = random_string(rng, s1.size(), 3);
        auto [w1, w2] = wrap_sentinels(s1, s2);
        CHECK(hamming_oracle(w1, w2).distance == hamming_oracle(s1, s2).distance + 2);
    }
}

TEST_CASE("fast factorizers equal the oracle on short binary strings")
{
    for (std::size_t n = 0; n <= 10; ++n) {
        for (std::uint64_t code = 0; code < (1ull << n); ++code) {
            const auto s = binary_string(code, n);
            for (Mode m : {Mode::LZN, Mode::LZS, Mode::CN}) {
                REQUIRE(factorize(s, m) == oracle::factorize(s, m));
            }
        }
    }
}

TEST_CASE("round trip, sandwich and dominance on random strings")
{
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 2000; ++t) {
        const Symbol sigma = 2 + static_cast<Symbol>(t % 7);
        const auto s = random_string(rng, rng() % 300, sigma);
        const auto zn = factorize_lzn(s);
        const auto zs = factorize_lzs(s);
        const auto cn = factorize_cn(s);
        REQUIRE(decompress(zn) == s);
        REQUIRE(decompress(zs) == s);
        REQUIRE(decompress(cn) == s);
        CHECK(zn.size() <= cn.size());
        CHECK(cn.size() <= 2 * zn.size());
        CHECK(zs.size() <= zn.size());
        if (t % 50 == 0) {
            for (std::size_t j = 1; j <= s.size(); ++j) {
                CHECK(factorize_lzn(s.span().subspan(0, j)).size() <= zn.size());
            }
        }
    }
}

TEST_CASE("text and ints serialization round trip")
{
    std::mt19937_64 rng(99);
    for (int t = 0; t < 300; ++t) {
        const auto s = random_string(rng, rng() % 64, 5);
        for (Mode m : {Mode::LZN, Mode::LZS, Mode::CN}) {
            const auto f = factorize(s, m);
            CHECK(read_factorization(write_factorization(f, SymbolFormat::Ints)) == f);
        }
    }
    const auto tricky = text("a b\tc\\\n a b\tc\\\n");
    const auto f = factorize_lzn(tricky);
    CHECK(read_factorization(write_factorization(f, SymbolFormat::Text)) == f);
    const auto aaaa = factorize_lzn(text("aaaa"));
    CHECK(write_factorization(aaaa, SymbolFormat::Text) == "#mode=LZN n=4 format=text\n0\t1\ta\n1\t2\ta\n1\t1\ta\tT\n");
    CHECK_THROWS_AS((void)read_factorization("0\t1\ta\n"), FormatError);
    CHECK_THROWS_AS((void)read_factorization("#mode=LZN n=5 format=text\n0\t1\ta\n"), FormatError);
}

TEST_CASE("require_canonical")
{
    const auto s = text(kExample);
    CHECK_NOTHROW(require_canonical(factorize_lzn(s)));
    // A valid but non-greedy parse of "aab": a | a | b.
    Factorization lazy(Mode::LZN, {fr(0, 1, 'a'), fr(0, 1, 'a'), fr(0, 1, 'b')});
    CHECK_THROWS_AS(require_canonical(lazy), MalformedFactorization);
}

TEST_CASE("symbol ingestion")
{
    CHECK(SymbolString::from_ints(" 0 1  2\n42 ").symbols() == std::vector<Symbol>{0, 1, 2, 42});
    CHECK_THROWS_AS((void)SymbolString::from_ints("1 x"), FormatError);
    CHECK_THROWS_AS((void)SymbolString::from_ints("4294967294"), FormatError);
    const auto u = SymbolString::from_text("h\xC3\xA9");
    CHECK(u.symbols() == std::vector<Symbol>{'h', 0xE9});
    CHECK(u.to_text() == "h\xC3\xA9");
    CHECK_THROWS_AS((void)SymbolString::from_text("\xC3"), FormatError);
    CHECK_THROWS_AS((void)SymbolString::from_text("\xC0\x80"), FormatError);
}
