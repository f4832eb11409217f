#include "doctest.h"
#include "test_support.hpp"

#include "lzcomm/avl_constants.hpp"
#include "lzcomm/error.hpp"
#include "lzcomm/experiments.hpp"

#include <algorithm>
#include <atomic>

using namespace lzcomm;
using namespace lzcomm::experiments;

namespace {
SymbolString ints(std::initializer_list<Symbol> v) { return SymbolString(std::vector<Symbol>(v)); }
} // namespace

TEST_CASE("family generator")
{
    CHECK(gen_family({4, 1}) == ints({0, 1, 2, 3, 4, 0, 1, 2, 4}));
    CHECK(gen_family({4, 2}) == ints({0, 0, 1, 2, 3, 4, 0, 0, 1, 2, 4}));
    CHECK_THROWS_AS(gen_family({5, 1}), Error);
    CHECK_THROWS_AS(gen_family({2, 1}), Error);
    CHECK_THROWS_AS(gen_family({8, 0}), Error);
    CHECK_THROWS_AS(gen_family({8, 9}), Error);
    // Block lengths sum to sigma^2/4 + 3 sigma/2 - 1, plus h - 1 per zero run.
    for (unsigned sigma = 4; sigma <= 64; sigma += 2) {
        for (unsigned h : {1u, 2u, sigma}) {
            const std::size_t n = gen_family({sigma, h}).size();
            CHECK(n == sigma * sigma / 4 + 3 * sigma / 2 - 1 + (h - 1) * sigma / 2);
        }
    }
}

TEST_CASE("lower bound family counts")
{
    const auto rows = verify_lower_bound(4, 128);
    CHECK(rows.size() == 63);
    for (const auto& r : rows) {
        CHECK(r.holds);
        CHECK(2 * r.zn == 3 * r.sigma);
        CHECK(r.zn_suffix == 2 * r.sigma - 2);
    }
    const auto s8 = verify_lower_bound(8, 8);
    REQUIRE(s8.size() == 1);
    CHECK(s8[0].zn == 12);
    CHECK(s8[0].zn_suffix == 14);
    CHECK(verify_lower_bound(64, 64)[0].zn_suffix * 96 == 126 * verify_lower_bound(64, 64)[0].zn);
    CHECK(verify_lower_bound(4, 4)[0].ratio == 1.0);
    CHECK(rows.back().ratio >= 1.32);
}

TEST_CASE("run-length substitution counts")
{
    // Pinned from the factorizer; these sit just under 4/3 - 4/(3 sigma).
    const auto a = verify_lower_bound(32, 32, 32);
    CHECK(a[0].zn == 52);
    CHECK(a[0].zn_suffix == 67);
    CHECK_FALSE(a[0].holds);
    const auto b = verify_lower_bound(64, 64, 32);
    CHECK(b[0].zn == 100);
    CHECK(b[0].zn_suffix == 131);
    CHECK_FALSE(b[0].holds);
    for (const auto& r : verify_lower_bound(4, 128, 2)) CHECK(r.holds);
}

TEST_CASE("zeta scan")
{
    const auto fam = zeta_scan({gen_family({8, 1})}, Mode::LZN);
    REQUIRE(fam.max);
    CHECK(fam.max->z == 12);
    CHECK(fam.witnesses == 1);
    // The suffix from 2 gives 14; no other start beats it.
    CHECK(fam.max->i == 2);
    CHECK(fam.max->z_suffix == 14);

    const auto unary = zeta_scan({SymbolString(std::vector<Symbol>(50, 7))}, Mode::LZN);
    CHECK(unary.witnesses == 0);
    CHECK(unary.max->ratio <= 1.0);

    const auto ex = zeta_scan_exhaustive(2, 10, Mode::LZN);
    CHECK(ex.rows.size() == (1u << 11) - 4);
    CHECK(ex.violations == 0);
    CHECK(ex.witnesses > 0);
    for (const auto& r : ex.rows) CHECK(r.ratio <= r.bound);

    const auto zs = zeta_scan_random(20, 64, 3, 5, Mode::LZS);
    CHECK(zs.rows.size() == 20);
    CHECK(zs.mode == Mode::LZS);
    CHECK_THROWS_AS(zeta_scan({}, Mode::CN), Error);
}

TEST_CASE("chain scan")
{
    std::mt19937_64 rng(31);
    std::vector<SymbolString> corpus;
    for (unsigned sigma : {8u, 16u, 32u}) corpus.push_back(gen_family({sigma, 1}));
    for (int t = 0; t < 5; ++t) corpus.push_back(lzcomm::testing::random_string(rng, 500, 3));
    corpus.push_back(SymbolString(std::vector<Symbol>(300, 1)));
    const auto rows = avl_chain_scan(corpus, 50, 7);
    std::size_t expected = 0;
    for (const auto& s : corpus) expected += std::min<std::size_t>(s.size(), 50);
    CHECK(rows.size() == expected);
    for (const auto& r : rows) {
        CHECK(r.chain_ok);
        CHECK(r.valid);
        CHECK(r.growth <= avl::kCSplit);
    }
    CHECK(chain_csv(rows).rfind("id,n,i,zn_suffix,cn_suffix,avl_suffix,avl,growth,chain_ok,valid\n", 0) == 0);
}

TEST_CASE("protocol bench")
{
    BenchParams p;
    p.n = 512;
    p.distances = {0, 1, 3};
    p.pairs = 5;
    p.seed = 3;
    const auto rows = protocol_bench(p);
    CHECK(rows.size() == 15);
    for (const auto& r : rows) {
        CHECK_FALSE(r.error);
        CHECK(r.rounds <= r.round_bound);
        CHECK(r.invocations == r.d + 3);
    }
    p.family = true;
    for (const auto& r : protocol_bench(p)) CHECK_FALSE(r.error);
    const auto fit = fit_rounds(rows);
    CHECK(fit.slope > 0);
    CHECK(bench_csv(rows) == bench_csv(protocol_bench([&] { auto q = p; q.family = false; return q; }())));
}

TEST_CASE("parallel_for visits every index once")
{
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS(parallel_for(10, [](std::size_t i) {
        if (i == 3) throw Error("boom");
    }));
}

TEST_CASE("csv output is deterministic")
{
    CHECK(lower_bound_csv(verify_lower_bound(4, 10)) == lower_bound_csv(verify_lower_bound(4, 10)));
    CHECK(lower_bound_csv(verify_lower_bound(4, 4)) ==
          "sigma,h,n,zn,zn_suffix,ratio,bound,holds\n4,1,9,6,6,1.000000,1.000000,1\n");
}
