// Acceptance checks. Prints one PASS/FAIL line per criterion; `--only N`
// runs a single one. Exit status is nonzero when any selected check fails.

#include "lzcomm/avl_constants.hpp"
#include "lzcomm/experiments.hpp"
#include "lzcomm/factorization.hpp"
#include "lzcomm/oracle.hpp"
#include "lzcomm/protocol.hpp"
#include "lzcomm/transcript.hpp"
#include "lzcomm/transport.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace lzcomm;
namespace ex = lzcomm::experiments;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

std::uint64_t clog2(std::uint64_t x) { return static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(x)))); }

SymbolString random_string(std::mt19937_64& rng, std::size_t n, Symbol sigma)
{
    std::vector<Symbol> out(n);
    for (auto& c : out) c = static_cast<Symbol>(rng() % sigma);
    return SymbolString(std::move(out));
}

SymbolString binary_string(std::uint64_t code, std::size_t n)
{
    std::vector<Symbol> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<Symbol>((code >> i) & 1u);
    return SymbolString(std::move(out));
}

// Exhaustive binary strings of length 1..16, then 10^4 random strings with
// n <= 512 over sigma 2, 4 or 8.
std::vector<SymbolString> shared_corpus()
{
    std::vector<SymbolString> out;
    for (std::size_t n = 1; n <= 16; ++n)
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) out.push_back(binary_string(code, n));
    std::mt19937_64 rng(2024);
    const Symbol sigmas[] = {2, 4, 8};
    for (int t = 0; t < 10000; ++t) out.push_back(random_string(rng, 1 + rng() % 512, sigmas[rng() % 3]));
    return out;
}

std::string run_cli(const std::string& args, int& status)
{
    const std::string cmd = std::string(LZCOMM_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        status = -1;
        return {};
    }
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    status = ::pclose(pipe);
    return out;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict worked_example()
{
    const auto s = SymbolString::from_text("abaababaabaabaabaabaabb");
    const auto t0 = std::chrono::steady_clock::now();
    const auto zn = factorize_lzn(s);
    const auto zs = factorize_lzs(s);
    const auto cn = factorize_cn(s);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const std::string want = "(0,0,a),(0,0,b),(1,2,a),(2,3,b),(3,5,a),(7,7,b),(3,4,b)";
    const std::string got = render_triples(zn, SymbolFormat::Text);
    Verdict v;
    v.pass = zn.size() == 7 && zs.size() == 6 && cn.size() == 8 && got == want && ms < 1.0;
    v.detail = "zn=" + std::to_string(zn.size()) + " zs=" + std::to_string(zs.size()) + " cn=" +
               std::to_string(cn.size()) + " triples " + (got == want ? "match" : "differ: " + got) + ", " +
               std::to_string(ms) + " ms";
    return v;
}

Verdict lower_bound_family()
{
    Verdict v;
    std::ostringstream d;
    const auto base = ex::verify_lower_bound(4, 128, 1);
    std::size_t bad = 0;
    for (const auto& r : base) bad += !r.holds;
    const auto& last = base.back();
    d << "h=1: " << base.size() - bad << "/" << base.size() << " exact; ratio(128)=" << last.ratio;
    if (bad || last.ratio < 1.32) v.pass = false;

    // Run-length substitution, one value of h per sigma.
    const std::pair<const char*, std::function<unsigned(unsigned)>> variants[] = {
        {"2", [](unsigned) { return 2u; }},
        {"sigma/2", [](unsigned s) { return s / 2; }},
        {"sigma", [](unsigned s) { return s; }},
    };
    for (const auto& [name, pick] : variants) {
        std::vector<unsigned> failed;
        std::size_t total = 0;
        for (unsigned sigma = 4; sigma <= 128; sigma += 2) {
            const auto rows = ex::verify_lower_bound(sigma, sigma, pick(sigma));
            ++total;
            if (!rows.front().holds) failed.push_back(sigma);
        }
        d << "; h=" << name << ": " << total - failed.size() << "/" << total << " hold";
        if (!failed.empty()) {
            v.pass = false;
            d << " (fails at sigma";
            for (std::size_t i = 0; i < failed.size() && i < 6; ++i) d << " " << failed[i];
            if (failed.size() > 6) d << " ... " << failed.back();
            d << ")";
        }
    }
    v.detail = d.str();
    return v;
}

Verdict sandwich(const std::vector<SymbolString>& corpus)
{
    std::size_t violations = 0;
    for (const auto& s : corpus) {
        const std::size_t z = factorize_lzn(s).size();
        const std::size_t c = factorize_cn(s).size();
        violations += !(z <= c && c <= 2 * z);
    }
    return {violations == 0, std::to_string(corpus.size()) + " strings, " + std::to_string(violations) + " violations"};
}

Verdict avl_chain(const std::vector<SymbolString>& corpus)
{
    std::vector<SymbolString> all = corpus;
    for (unsigned sigma = 8; sigma <= 256; sigma += 8) all.push_back(ex::gen_family({sigma, 1}));
    for (unsigned sigma = 8; sigma <= 128; sigma += 24) all.push_back(ex::gen_family({sigma, sigma / 2}));
    std::size_t longest = 0;
    for (const auto& s : all) longest = std::max(longest, s.size());

    const auto rows = ex::avl_chain_scan(all, 50, 4242);
    std::size_t chain_bad = 0, invalid = 0, over = 0;
    double growth = -1e9;
    for (const auto& r : rows) {
        chain_bad += !r.chain_ok;
        invalid += !r.valid;
        over += r.growth > avl::kCSplit;
        growth = std::max(growth, r.growth);
    }
    std::ostringstream d;
    d << all.size() << " strings (n <= " << longest << "), " << rows.size() << " splits; chain violations "
      << chain_bad << ", invalid grammars " << invalid << ", max growth " << growth << " vs C_split "
      << avl::kCSplit;
    return {chain_bad == 0 && invalid == 0 && over == 0, d.str()};
}

Verdict lcp_protocol_check()
{
    std::mt19937_64 rng(5150);
    ProtocolConfig cfg;
    std::size_t wrong = 0, over = 0, max_rounds = 0;
    for (int t = 0; t < 10000; ++t) {
        const Symbol sigma = 2 + rng() % 7;
        const std::size_t n = 1 + rng() % (std::size_t{1} << 14);
        const auto a = random_string(rng, n, sigma);
        // Keep a prefix of A, then diverge (or stop, making B a prefix).
        const std::size_t keep = rng() % (n + 1);
        std::vector<Symbol> b(a.begin(), a.begin() + static_cast<long>(keep));
        if (keep < n && rng() % 8 != 0) {
            b.push_back((a[keep] + 1 + rng() % (sigma - 1)) % sigma);
            const std::size_t tail = rng() % (n - keep);
            for (std::size_t i = 0; i < tail; ++i) b.push_back(static_cast<Symbol>(rng() % sigma));
        }
        const SymbolString bs(std::move(b));
        cfg.seed = rng();
        const auto out = lcp_protocol(factorize_lzn(a), factorize_lzn(bs), cfg);
        wrong += out.lcp != oracle::lcp(a, bs);
        const std::size_t rounds = out.transcript.rounds();
        over += rounds > 4 * clog2(out.matching_factors + 2) + 2;
        max_rounds = std::max(max_rounds, rounds);
    }
    return {wrong == 0 && over == 0, "10000 pairs, " + std::to_string(wrong) + " wrong, " + std::to_string(over) +
                                         " over the round bound, max rounds " + std::to_string(max_rounds)};
}

Verdict hamming_check()
{
    ex::BenchParams p;
    p.pairs = 1000;
    p.seed = 777;
    const auto rows = ex::protocol_bench(p);
    std::size_t errors = 0, count_bad = 0, over = 0;
    for (const auto& r : rows) {
        errors += r.error;
        // Sentinel wrapping adds two mismatches to the raw distance.
        count_bad += r.invocations != r.d + 3;
        over += r.rounds > r.round_bound;
    }
    const auto fit = ex::fit_rounds(rows);
    std::ostringstream d;
    d << rows.size() << " pairs, " << errors << " wrong, " << count_bad << " with invocations != d_raw+1, " << over
      << " over the round bound; rounds ~ " << fit.slope << " * d log2 z + " << fit.intercept;
    return {errors == 0 && count_bad == 0 && over == 0, d.str()};
}

// Alice runs in a forked child; Bob stays here. Both transcripts must equal
// the in-process one byte for byte.
bool socket_matches(bool hamming, const SymbolString& a, const SymbolString& b, const ProtocolConfig& cfg)
{
    const auto fa = factorize_lzn(a), fb = factorize_lzn(b);
    const std::string local = hamming ? to_json_lines(hamming_protocol(fa, fb, cfg).transcript)
                                      : to_json_lines(lcp_protocol(fa, fb, cfg).transcript);
    Listener listener(0);
    char path[] = "/tmp/lzcomm_accept_XXXXXX";
    const int fd = ::mkstemp(path);
    if (fd < 0) return false;
    ::close(fd);
    const pid_t pid = ::fork();
    if (pid < 0) return false;
    if (pid == 0) {
        int code = 0;
        try {
            Socket s = connect_to("127.0.0.1", listener.port());
            const std::string out = hamming ? to_json_lines(hamming_over_socket(Speaker::Alice, fa, cfg, s).transcript)
                                            : to_json_lines(lcp_over_socket(Speaker::Alice, fa, cfg, s).transcript);
            std::ofstream(path) << out;
        } catch (...) {
            code = 1;
        }
        ::_exit(code);
    }
    std::string bob;
    try {
        Socket s = listener.accept();
        bob = hamming ? to_json_lines(hamming_over_socket(Speaker::Bob, fb, cfg, s).transcript)
                      : to_json_lines(lcp_over_socket(Speaker::Bob, fb, cfg, s).transcript);
    } catch (...) {
    }
    int status = 0;
    ::waitpid(pid, &status, 0);
    const std::string alice = slurp(path);
    ::unlink(path);
    return WIFEXITED(status) && WEXITSTATUS(status) == 0 && bob == local && alice == local;
}

Verdict transport_fidelity()
{
    std::mt19937_64 rng(31337);
    std::size_t same = 0;
    for (int t = 0; t < 10; ++t) {
        const bool hamming = t % 2 == 1;
        const auto a = random_string(rng, 500 + rng() % 2000, 4);
        std::vector<Symbol> b(a.begin(), a.end());
        for (int k = 0; k < 1 + t; ++k) {
            const std::size_t at = rng() % b.size();
            b[at] = (b[at] + 1) % 4;
        }
        ProtocolConfig cfg;
        cfg.seed = rng();
        same += socket_matches(hamming, a, SymbolString(std::move(b)), cfg);
    }
    return {same == 10, std::to_string(same) + "/10 socket transcripts identical to in-process"};
}

Verdict oracle_equivalence(const std::vector<SymbolString>& corpus)
{
    std::size_t mismatches = 0;
    for (const auto& s : corpus)
        for (const Mode m : {Mode::LZN, Mode::LZS, Mode::CN}) mismatches += !(factorize(s, m) == oracle::factorize(s, m));
    return {mismatches == 0,
            std::to_string(corpus.size()) + " strings x 3 modes, " + std::to_string(mismatches) + " mismatches"};
}

Verdict determinism()
{
    std::ifstream list(std::string(LZCOMM_GOLDEN_DIR) + "/commands.txt");
    std::string line;
    std::size_t total = 0, unstable = 0, off_golden = 0, failed = 0;
    std::string first_bad;
    while (std::getline(list, line)) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        const std::string name = line.substr(0, tab), args = line.substr(tab + 1);
        ++total;
        int s1 = 0, s2 = 0;
        const std::string one = run_cli(args, s1), two = run_cli(args, s2);
        const bool ok_run = s1 == 0 && s2 == 0, stable = one == two;
        const bool golden = one == slurp(std::string(LZCOMM_GOLDEN_DIR) + "/" + name + ".out");
        failed += !ok_run;
        unstable += !stable;
        off_golden += !golden;
        if ((!ok_run || !stable || !golden) && first_bad.empty()) first_bad = name;
    }
    std::string d = std::to_string(total) + " commands, " + std::to_string(failed) + " failed, " +
                    std::to_string(unstable) + " unstable, " + std::to_string(off_golden) + " differ from golden";
    if (!first_bad.empty()) d += " (first: " + first_bad + ")";
    return {total > 0 && failed == 0 && unstable == 0 && off_golden == 0, d};
}

} // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--only") only = std::atoi(argv[i + 1]);

    std::vector<SymbolString> corpus;
    auto shared = [&]() -> const std::vector<SymbolString>& {
        if (corpus.empty()) corpus = shared_corpus();
        return corpus;
    };

    struct Criterion {
        const char* name;
        double budget_s;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria = {
        {"worked example sizes", 1, worked_example},
        {"lower-bound family", 10, lower_bound_family},
        {"sandwich zn <= cn <= 2 zn", 120, [&] { return sandwich(shared()); }},
        {"avl chain", 300, [&] { return avl_chain(shared()); }},
        {"lcp protocol", 180, lcp_protocol_check},
        {"hamming protocol", 300, hamming_check},
        {"transport fidelity", 30, transport_fidelity},
        {"oracle equivalence", 180, [&] { return oracle_equivalence(shared()); }},
        {"cli determinism", 60, determinism},
    };

    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (only != 0 && only != id) continue;
        const auto& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) {
            v.pass = false;
            v.detail += "; over time budget";
        }
        all = all && v.pass;
        std::cout << "criterion " << id << " " << (v.pass ? "PASS" : "FAIL") << " [" << c.name << "] " << v.detail
                  << " (" << std::fixed;
        std::cout.precision(2);
        std::cout << secs << " s)" << std::defaultfloat << std::endl;
        std::cout.precision(6);
    }
    return all ? 0 : 1;
}
