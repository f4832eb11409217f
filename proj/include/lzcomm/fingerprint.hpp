#pragma once

#include "lzcomm/factorization.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lzcomm {

/// Public-coin stream shared by both parties. SplitMix64 over a 64-bit
/// state: draw k (0-based) is mix(seed + (k + 1) * 0x9E3779B97F4A7C15).
class CoinStream {
public:
    explicit CoinStream(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t next() noexcept;
    void advance(std::uint64_t draws) noexcept { counter_ += draws; }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

/// Uniform in [2, 2^61 - 3], by rejection on the top 61 bits of a draw.
std::uint64_t draw_base(CoinStream& coins);

/// Karp-Rabin scheme over 2^61 - 1. `width` is the number of bits charged
/// (and compared) per transmitted fingerprint.
struct FingerprintScheme {
    std::uint64_t base = 2;
    unsigned width = 64;

    static FingerprintScheme draw(CoinStream& coins, unsigned width);

    /// Low `width` bits of a field element; that is what goes on the wire.
    std::uint64_t truncate(std::uint64_t value) const noexcept;
};

std::uint64_t mul_mod61(std::uint64_t a, std::uint64_t b) noexcept;
std::uint64_t add_mod61(std::uint64_t a, std::uint64_t b) noexcept;

/// Every factor contributes three field elements: source, 2*length+truncated,
/// last symbol. A padding element (source 0, 0, tag) never collides with a
/// real factor because real lengths are >= 1.
std::uint64_t fold_factor(std::uint64_t acc, const Factor& f, std::uint64_t base) noexcept;
std::uint64_t fold_padding(std::uint64_t acc, std::uint64_t tag, std::uint64_t base) noexcept;

/// Horner evaluation over the first k factors; k = 0 gives 0.
/// Throws Error when k > factors.size().
std::uint64_t fp_of_prefix(std::span<const Factor> factors, std::size_t k, const FingerprintScheme& scheme);

/// Prefix fingerprints extended on demand.
class PrefixFingerprints {
public:
    explicit PrefixFingerprints(std::uint64_t base) : base_(base), prefix_{0} {}

    void push(const Factor& f) { prefix_.push_back(fold_factor(prefix_.back(), f, base_)); }
    std::size_t count() const noexcept { return prefix_.size() - 1; }
    std::uint64_t operator[](std::size_t k) const { return prefix_[k]; }

    /// Fingerprint of the first k elements of factors . tag^inf.
    std::uint64_t padded(std::size_t k, std::uint64_t tag) const;

    std::uint64_t base() const noexcept { return base_; }

private:
    std::uint64_t base_;
    std::vector<std::uint64_t> prefix_;
};

} // namespace lzcomm
