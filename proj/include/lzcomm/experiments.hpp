#pragma once

#include "lzcomm/factorization.hpp"
#include "lzcomm/protocol.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lzcomm::experiments {

struct FamilyParams {
    unsigned sigma = 4;
    unsigned h = 1; // run length replacing every 0
};

/// (0 1 ... sigma) then (0 1 ... 2k, 2k+2) for k = 1..sigma/2-1, with every
/// 0 widened to 0^h. Throws Error unless sigma is even and >= 4 and
/// 1 <= h <= sigma.
SymbolString gen_family(const FamilyParams& p);

struct LowerBoundRow {
    unsigned sigma = 0;
    unsigned h = 1;
    std::size_t n = 0;
    std::size_t zn = 0;
    std::size_t zn_suffix = 0; // zn(S[h+1..])
    double ratio = 0;
    // h = 1: zn = 3 sigma / 2 and zn_suffix = 2 sigma - 2.
    // h > 1: zn_suffix / zn >= 4/3 - 4/(3 sigma), compared exactly.
    bool holds = false;
};

/// One row per even sigma in [lo, hi]. A failed claim is reported in
/// `holds`, never thrown.
std::vector<LowerBoundRow> verify_lower_bound(unsigned lo, unsigned hi, unsigned h = 1);
std::string lower_bound_csv(const std::vector<LowerBoundRow>& rows);

/// Ratio bound implied by the pinned grammar constants:
/// zn(S') <= avl(S') <= avl(S) + C_split log n <= 2 C_build zn(S) log(n+1) + C_split log n.
double chain_ratio_bound(std::size_t n, std::size_t zn);

struct ZetaRow {
    std::size_t id = 0;
    std::size_t n = 0;
    std::size_t i = 0; // suffix start (1-based) reaching the largest ratio
    std::size_t z = 0;
    std::size_t z_suffix = 0;
    double ratio = 0;
    double bound = 0;
};

struct ZetaReport {
    Mode mode = Mode::LZN;
    std::vector<ZetaRow> rows; // one per string of length >= 2
    std::optional<ZetaRow> max;
    std::size_t witnesses = 0;  // strings with some ratio > 1
    std::size_t violations = 0; // LZN ratios above chain_ratio_bound
};

ZetaReport zeta_scan(const std::vector<SymbolString>& corpus, Mode mode);
/// Every string over {0..alphabet-1} of length 2..max_len.
ZetaReport zeta_scan_exhaustive(unsigned alphabet, unsigned max_len, Mode mode);
ZetaReport zeta_scan_random(std::size_t count, std::size_t n, unsigned sigma, std::uint64_t seed, Mode mode);
std::string zeta_csv(const ZetaReport& report);

struct ChainRow {
    std::size_t id = 0;
    std::size_t n = 0;
    std::size_t i = 0;
    std::size_t zn_suffix = 0;
    std::size_t cn_suffix = 0;
    std::size_t avl_suffix = 0;
    std::size_t avl = 0;
    double growth = 0; // (avl_suffix - avl) / ceil(log2 n)
    bool chain_ok = false;
    bool valid = false; // balance validator on both split results
};

/// `samples` suffix starts per string drawn from `seed`; every start when
/// the string is short enough.
std::vector<ChainRow> avl_chain_scan(const std::vector<SymbolString>& corpus, std::size_t samples,
                                     std::uint64_t seed);
std::string chain_csv(const std::vector<ChainRow>& rows);

struct BenchParams {
    std::size_t n = 1u << 14;
    std::vector<std::size_t> distances{0, 1, 2, 5, 16, 32};
    std::size_t pairs = 10;
    unsigned sigma = 4;
    bool family = false; // base strings from the lower-bound family
    std::uint64_t seed = 0;
    ProtocolConfig config;
};

struct BenchRow {
    std::size_t pair = 0;
    std::size_t n = 0;
    std::size_t z = 0; // zn(A)
    std::size_t d = 0;
    std::uint64_t gap_max = 0;
    std::size_t invocations = 0;
    std::size_t rounds = 0;
    std::uint64_t bits = 0;
    std::uint64_t round_bound = 0; // sum over jumps of 4 ceil(log2(zn(suffix) + 2)) + 2
    bool error = false;
};

std::vector<BenchRow> protocol_bench(const BenchParams& p);
std::string bench_csv(const std::vector<BenchRow>& rows);

struct LineFit {
    double slope = 0;
    double intercept = 0;
};
/// Least squares of rounds against d * log2(z).
LineFit fit_rounds(const std::vector<BenchRow>& rows);

/// Runs fn(0..count-1) over hardware threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace lzcomm::experiments
