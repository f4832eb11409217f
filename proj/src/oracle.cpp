#include "lzcomm/oracle.hpp"

namespace lzcomm::oracle {

namespace {

// lcp(S[u..], S[j..bound-1]) with 0-based indices; bound = n for the
// self-referencing variant.
std::size_t bounded_lcp(std::span<const Symbol> s, std::size_t u, std::size_t j, std::size_t bound)
{
    std::size_t l = 0;
    while (u + l < s.size() && j + l < bound && s[j + l] == s[u + l]) ++l;
    return l;
}

} // namespace

Factorization factorize(std::span<const Symbol> s, Mode mode)
{
    const std::size_t n = s.size();
    std::vector<Factor> out;
    std::size_t u = 0;
    while (u < n) {
        std::size_t best = 0;
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < u; ++j) {
            const std::size_t bound = mode == Mode::LZS ? n : u;
            const std::size_t l = bounded_lcp(s, u, j, bound);
            if (l > best) {
                best = l;
                best_j = j;
            }
        }
        Factor f;
        if (best == 0) {
            f.source = 0;
            f.length = 1;
            f.last = s[u];
        } else if (mode == Mode::CN) {
            f.source = best_j + 1;
            f.length = best;
            f.last = s[u + best - 1];
        } else if (u + best >= n) {
            f.source = best_j + 1;
            f.length = best;
            f.last = s[n - 1];
            f.truncated = true;
        } else {
            f.source = best_j + 1;
            f.length = best + 1;
            f.last = s[u + best];
        }
        out.push_back(f);
        u += f.length;
    }
    return Factorization(mode, std::move(out));
}

std::size_t lcp(std::span<const Symbol> x, std::span<const Symbol> y)
{
    std::size_t l = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] != y[i]) break;
        ++l;
    }
    return l;
}

} // namespace lzcomm::oracle
