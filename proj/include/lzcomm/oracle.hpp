#pragma once

#include "lzcomm/factorization.hpp"

#include <span>

// Brute-force reference implementations. Nothing here calls into the fast
// factorizers; tests compare the two.
namespace lzcomm::oracle {

Factorization factorize(std::span<const Symbol> s, Mode mode);

std::size_t lcp(std::span<const Symbol> x, std::span<const Symbol> y);

} // namespace lzcomm::oracle
