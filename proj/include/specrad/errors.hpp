#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace specrad {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration documents.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A request the chosen law, storage or size cannot serve.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Exact enumeration would exceed its capacity; use Monte Carlo instead.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Depth-first enumeration ran past its node budget. The partial count is
/// carried for diagnostics only and must not be used as a result.
class BudgetError : public Error {
public:
    BudgetError(const std::string& what, std::uint64_t partial)
        : Error(what), partial_count(partial) {}
    std::uint64_t partial_count;
};

class NumericalError : public Error {
public:
    NumericalError(const std::string& what, long iterations)
        : Error(what + " (iterations: " + std::to_string(iterations) + ")"),
          iterations(iterations) {}
    long iterations;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at byte " + std::to_string(offset)), offset(offset) {}
    std::size_t offset;
};

}  // namespace specrad
