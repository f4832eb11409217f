#include "lzcomm/fingerprint.hpp"

#include "lzcomm/error.hpp"

namespace lzcomm {

namespace {
__extension__ typedef unsigned __int128 u128;
}

std::uint64_t CoinStream::next() noexcept
{
    ++counter_;
    std::uint64_t z = seed_ + counter_ * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t draw_base(CoinStream& coins)
{
    while (true) {
        const std::uint64_t x = coins.next() >> 3;
        if (x >= 2 && x <= kMersenne61 - 2) return x;
    }
}

FingerprintScheme FingerprintScheme::draw(CoinStream& coins, unsigned width)
{
    if (width == 0 || width > 64) throw Error("fingerprint width must be in [1, 64]");
    return FingerprintScheme{draw_base(coins), width};
}

std::uint64_t FingerprintScheme::truncate(std::uint64_t value) const noexcept
{
    return width >= 64 ? value : value & ((std::uint64_t{1} << width) - 1);
}

std::uint64_t mul_mod61(std::uint64_t a, std::uint64_t b) noexcept
{
    const u128 p = static_cast<u128>(a) * b;
    std::uint64_t r = static_cast<std::uint64_t>(p & kMersenne61) + static_cast<std::uint64_t>(p >> 61);
    if (r >= kMersenne61) r -= kMersenne61;
    return r;
}

std::uint64_t add_mod61(std::uint64_t a, std::uint64_t b) noexcept
{
    std::uint64_t r = a + b;
    if (r >= kMersenne61) r -= kMersenne61;
    return r;
}

namespace {

std::uint64_t reduce(std::uint64_t v) noexcept
{
    v = (v & kMersenne61) + (v >> 61);
    return v >= kMersenne61 ? v - kMersenne61 : v;
}

std::uint64_t fold3(std::uint64_t acc, std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t base) noexcept
{
    acc = add_mod61(mul_mod61(acc, base), reduce(a));
    acc = add_mod61(mul_mod61(acc, base), reduce(b));
    acc = add_mod61(mul_mod61(acc, base), reduce(c));
    return acc;
}

} // namespace

std::uint64_t fold_factor(std::uint64_t acc, const Factor& f, std::uint64_t base) noexcept
{
    return fold3(acc, f.source, 2 * static_cast<std::uint64_t>(f.length) + (f.truncated ? 1 : 0), f.last, base);
}

std::uint64_t fold_padding(std::uint64_t acc, std::uint64_t tag, std::uint64_t base) noexcept
{
    return fold3(acc, 0, 0, tag, base);
}

std::uint64_t fp_of_prefix(std::span<const Factor> factors, std::size_t k, const FingerprintScheme& scheme)
{
    if (k > factors.size()) {
        throw Error("fingerprint prefix " + std::to_string(k) + " exceeds " + std::to_string(factors.size()) +
                    " factors");
    }
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < k; ++i) acc = fold_factor(acc, factors[i], scheme.base);
    return acc;
}

std::uint64_t PrefixFingerprints::padded(std::size_t k, std::uint64_t tag) const
{
    if (k <= count()) return prefix_[k];
    std::uint64_t acc = prefix_.back();
    for (std::size_t i = count(); i < k; ++i) acc = fold_padding(acc, tag, base_);
    return acc;
}

} // namespace lzcomm
