#include "lzcomm/experiments.hpp"

#include "lzcomm/avl_constants.hpp"
#include "lzcomm/avl_grammar.hpp"
#include "lzcomm/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

namespace lzcomm::experiments {

namespace {

double ceil_log2(double x) { return std::ceil(std::log2(x)); }

std::string fmt_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

template <typename... Ts>
std::string csv_line(const Ts&... fields)
{
    std::string out;
    auto add = [&](const auto& f) {
        if (!out.empty()) out += ',';
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, double>) out += fmt_double(f);
        else if constexpr (std::is_same_v<F, bool>) out += f ? "1" : "0";
        else if constexpr (std::is_convertible_v<F, std::string>) out += f;
        else out += std::to_string(f);
    };
    (add(fields), ...);
    out += '\n';
    return out;
}

std::size_t count_factors(std::span<const Symbol> s, Mode mode) { return factorize(s, mode).size(); }

} // namespace

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn)
{
    const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

SymbolString gen_family(const FamilyParams& p)
{
    if (p.sigma < 4 || p.sigma % 2 != 0) throw Error("sigma must be even and at least 4");
    if (p.h < 1 || p.h > p.sigma) throw Error("h must be in [1, sigma]");
    std::vector<Symbol> s;
    auto zeros = [&] { s.insert(s.end(), p.h, 0); };
    zeros();
    for (unsigned c = 1; c <= p.sigma; ++c) s.push_back(c);
    for (unsigned k = 1; k < p.sigma / 2; ++k) {
        zeros();
        for (unsigned c = 1; c <= 2 * k; ++c) s.push_back(c);
        s.push_back(2 * k + 2);
    }
    return SymbolString(std::move(s));
}

std::vector<LowerBoundRow> verify_lower_bound(unsigned lo, unsigned hi, unsigned h)
{
    std::vector<LowerBoundRow> rows;
    for (unsigned sigma = lo + lo % 2; sigma <= hi; sigma += 2) {
        if (sigma < 4 || h > sigma) continue;
        const SymbolString s = gen_family({sigma, h});
        LowerBoundRow r;
        r.sigma = sigma;
        r.h = h;
        r.n = s.size();
        r.zn = factorize_lzn(s).size();
        r.zn_suffix = factorize_lzn(s.span().subspan(h)).size();
        r.ratio = static_cast<double>(r.zn_suffix) / static_cast<double>(r.zn);
        if (h == 1) {
            r.holds = 2 * r.zn == 3 * std::size_t{sigma} && r.zn_suffix == 2 * std::size_t{sigma} - 2;
        } else {
            // zn_suffix / zn >= (4 sigma - 4) / (3 sigma)
            r.holds = 3 * std::uint64_t{sigma} * r.zn_suffix >= (4 * std::uint64_t{sigma} - 4) * r.zn;
        }
        rows.push_back(r);
    }
    return rows;
}

std::string lower_bound_csv(const std::vector<LowerBoundRow>& rows)
{
    std::string out = "sigma,h,n,zn,zn_suffix,ratio,bound,holds\n";
    for (const auto& r : rows) {
        const double bound = 4.0 / 3.0 - 4.0 / (3.0 * r.sigma);
        out += csv_line(r.sigma, r.h, r.n, r.zn, r.zn_suffix, r.ratio, bound, r.holds);
    }
    return out;
}

double chain_ratio_bound(std::size_t n, std::size_t zn)
{
    if (n < 2 || zn == 0) return 0;
    const double dn = static_cast<double>(n);
    return 2.0 * avl::kCBuild * ceil_log2(dn + 1) + avl::kCSplit * ceil_log2(dn) / static_cast<double>(zn);
}

ZetaReport zeta_scan(const std::vector<SymbolString>& corpus, Mode mode)
{
    if (mode == Mode::CN) throw Error("zeta scans use LZN or LZS");
    ZetaReport report;
    report.mode = mode;
    std::vector<std::optional<ZetaRow>> rows(corpus.size());
    std::vector<char> witness(corpus.size(), 0);
    parallel_for(corpus.size(), [&](std::size_t id) {
        const SymbolString& s = corpus[id];
        if (s.size() < 2) return;
        ZetaRow best;
        best.id = id;
        best.n = s.size();
        best.z = count_factors(s, mode);
        best.bound = chain_ratio_bound(s.size(), best.z);
        best.ratio = -1;
        for (std::size_t i = 2; i <= s.size(); ++i) {
            const std::size_t zi = count_factors(s.span().subspan(i - 1), mode);
            const double ratio = static_cast<double>(zi) / static_cast<double>(best.z);
            if (zi > best.z) witness[id] = 1;
            if (best.ratio < 0 || zi > best.z_suffix) {
                best.i = i;
                best.z_suffix = zi;
                best.ratio = ratio;
            }
        }
        rows[id] = best;
    });
    for (std::size_t id = 0; id < rows.size(); ++id) {
        if (!rows[id]) continue;
        const ZetaRow& r = *rows[id];
        report.rows.push_back(r);
        report.witnesses += witness[id];
        if (mode == Mode::LZN && r.ratio > r.bound) ++report.violations;
        // Largest ratio, compared exactly by cross-multiplication.
        if (!report.max || r.z_suffix * report.max->z > report.max->z_suffix * r.z) report.max = r;
    }
    return report;
}

ZetaReport zeta_scan_exhaustive(unsigned alphabet, unsigned max_len, Mode mode)
{
    if (alphabet < 1) throw Error("alphabet must be non-empty");
    std::vector<SymbolString> corpus;
    for (unsigned n = 2; n <= max_len; ++n) {
        std::vector<Symbol> s(n, 0);
        for (;;) {
            corpus.emplace_back(s);
            std::size_t k = 0;
            while (k < n && ++s[k] == alphabet) s[k++] = 0;
            if (k == n) break;
        }
    }
    return zeta_scan(corpus, mode);
}

ZetaReport zeta_scan_random(std::size_t count, std::size_t n, unsigned sigma, std::uint64_t seed, Mode mode)
{
    if (sigma < 1) throw Error("alphabet must be non-empty");
    std::mt19937_64 rng(seed);
    std::vector<SymbolString> corpus;
    for (std::size_t t = 0; t < count; ++t) {
        std::vector<Symbol> s(n);
        for (auto& c : s) c = static_cast<Symbol>(rng() % sigma);
        corpus.emplace_back(std::move(s));
    }
    return zeta_scan(corpus, mode);
}

std::string zeta_csv(const ZetaReport& report)
{
    std::string out = "id,n,i,z,z_suffix,ratio,bound\n";
    for (const auto& r : report.rows) out += csv_line(r.id, r.n, r.i, r.z, r.z_suffix, r.ratio, r.bound);
    return out;
}

std::vector<ChainRow> avl_chain_scan(const std::vector<SymbolString>& corpus, std::size_t samples, std::uint64_t seed)
{
    std::vector<std::vector<std::size_t>> starts(corpus.size());
    std::mt19937_64 rng(seed);
    for (std::size_t id = 0; id < corpus.size(); ++id) {
        const std::size_t n = corpus[id].size();
        if (n == 0) continue;
        if (n <= samples) {
            for (std::size_t i = 1; i <= n; ++i) starts[id].push_back(i);
        } else {
            for (std::size_t k = 0; k < samples; ++k) starts[id].push_back(1 + rng() % n);
            std::sort(starts[id].begin(), starts[id].end());
        }
    }
    std::vector<std::vector<ChainRow>> parts(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t id) {
        const SymbolString& s = corpus[id];
        if (s.empty()) return;
        const avl::AvlGrammar g = avl::build(s);
        const bool g_valid = avl::validate(g).ok();
        const double logn = std::max(1.0, ceil_log2(static_cast<double>(s.size())));
        for (std::size_t i : starts[id]) {
            const auto [pre, suf] = avl::split(g, i);
            const auto tail = s.span().subspan(i - 1);
            ChainRow r;
            r.id = id;
            r.n = s.size();
            r.i = i;
            r.zn_suffix = factorize_lzn(tail).size();
            r.cn_suffix = factorize_cn(tail).size();
            r.avl_suffix = suf.size();
            r.avl = g.size();
            r.growth = (static_cast<double>(r.avl_suffix) - static_cast<double>(r.avl)) / logn;
            r.chain_ok = r.zn_suffix <= r.cn_suffix && r.cn_suffix <= r.avl_suffix;
            r.valid = g_valid && avl::validate(pre).ok() && avl::validate(suf).ok();
            parts[id].push_back(r);
        }
    });
    std::vector<ChainRow> rows;
    for (auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
    return rows;
}

std::string chain_csv(const std::vector<ChainRow>& rows)
{
    std::string out = "id,n,i,zn_suffix,cn_suffix,avl_suffix,avl,growth,chain_ok,valid\n";
    for (const auto& r : rows) {
        out += csv_line(r.id, r.n, r.i, r.zn_suffix, r.cn_suffix, r.avl_suffix, r.avl, r.growth, r.chain_ok, r.valid);
    }
    return out;
}

std::vector<BenchRow> protocol_bench(const BenchParams& p)
{
    p.config.validate();
    struct Job {
        std::size_t pair, d;
        SymbolString a, b;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    std::mt19937_64 rng(p.seed);
    // Family bases: the largest member that fits in n, cut to n.
    Symbol sigma = p.sigma;
    std::vector<Symbol> family_base;
    if (p.family) {
        unsigned fs = std::max(4u, p.sigma + p.sigma % 2);
        while (gen_family({fs + 2, 1}).size() <= p.n) fs += 2;
        const SymbolString f = gen_family({fs, 1});
        family_base.assign(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(std::min(f.size(), p.n)));
        sigma = fs + 1;
    }
    if (sigma < 2) throw Error("planting mismatches needs at least two symbols");
    for (std::size_t d : p.distances) {
        for (std::size_t pair = 0; pair < p.pairs; ++pair) {
            std::vector<Symbol> a;
            if (p.family) {
                a = family_base;
            } else {
                a.resize(p.n);
                for (auto& c : a) c = static_cast<Symbol>(rng() % sigma);
            }
            if (d > a.size()) throw Error("more mismatches than positions");
            std::vector<Symbol> b = a;
            std::vector<std::size_t> idx(a.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            for (std::size_t k = 0; k < d; ++k) {
                std::swap(idx[k], idx[k + rng() % (idx.size() - k)]);
                const std::size_t at = idx[k];
                b[at] = static_cast<Symbol>((b[at] + 1 + rng() % (sigma - 1)) % sigma);
            }
            jobs.push_back({pair, d, SymbolString(std::move(a)), SymbolString(std::move(b)), rng()});
        }
    }
    std::vector<BenchRow> rows(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t j) {
        const Job& job = jobs[j];
        ProtocolConfig cfg = p.config;
        cfg.seed = job.seed;
        const auto fa = factorize_lzn(job.a);
        const auto out = hamming_protocol(fa, factorize_lzn(job.b), cfg);
        const auto want = hamming_oracle(job.a, job.b);
        BenchRow r;
        r.pair = job.pair;
        r.n = job.a.size();
        r.z = fa.size();
        r.d = out.distance;
        r.gap_max = out.gap_max;
        r.invocations = out.jumps.size();
        r.rounds = out.transcript.rounds();
        r.bits = out.transcript.total_bits();
        r.error = out.distance != want.distance ||
                  !std::equal(out.positions.begin(), out.positions.end(), want.positions.begin(), want.positions.end());
        std::vector<Symbol> work;
        if (cfg.sentinel) work.push_back(kHashSentinel);
        work.insert(work.end(), job.a.begin(), job.a.end());
        if (cfg.sentinel) work.push_back(kDollarSentinel);
        for (const auto& jump : out.jumps) {
            const std::size_t z = factorize_lzn(std::span<const Symbol>(work).subspan(jump.offset)).size();
            r.round_bound += 4 * static_cast<std::uint64_t>(ceil_log2(static_cast<double>(z) + 2)) + 2;
        }
        rows[j] = r;
    });
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows)
{
    std::string out = "pair,n,z,d,gap_max,invocations,rounds,bits,round_bound,errors\n";
    for (const auto& r : rows) {
        out += csv_line(r.pair, r.n, r.z, r.d, r.gap_max, r.invocations, r.rounds, r.bits, r.round_bound,
                        static_cast<int>(r.error));
    }
    return out;
}

LineFit fit_rounds(const std::vector<BenchRow>& rows)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(rows.size());
    for (const auto& r : rows) {
        const double x = static_cast<double>(r.d) * std::log2(std::max<double>(2.0, static_cast<double>(r.z)));
        const double y = static_cast<double>(r.rounds);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    LineFit fit;
    const double den = m * sxx - sx * sx;
    if (rows.empty() || den == 0) {
        fit.intercept = rows.empty() ? 0 : sy / m;
        return fit;
    }
    fit.slope = (m * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

} // namespace lzcomm::experiments
