#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lzcomm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unparseable input: bad UTF-8, bad integer token, bad file header.
class FormatError : public Error {
public:
    using Error::Error;
};

/// A factor triple that violates the invariants of its mode.
class MalformedFactorization : public Error {
public:
    MalformedFactorization(std::size_t factor_index, const std::string& what)
        : Error("factor " + std::to_string(factor_index) + ": " + what),
          factor_index_(factor_index) {}

    std::size_t factor_index() const noexcept { return factor_index_; }

private:
    std::size_t factor_index_;
};

class GrammarError : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

} // namespace lzcomm
