#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace rplm {

/// Base class for every failure raised by the library. Callers that only
/// care about "the fit did not work" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw coordinates do not describe a point of the declared manifold.
class InvalidPoint : public Error {
public:
    using Error::Error;
};

/// A pair of points lies at or beyond the injectivity radius (sphere antipodes).
class OutsideInjectivityDomain : public Error {
public:
    using Error::Error;
};

/// Bandwidth or kernel argument outside its admissible range.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// No sample point carries positive kernel weight at a query.
class EmptyNeighborhood : public Error {
public:
    EmptyNeighborhood(std::string query, std::optional<std::size_t> index = std::nullopt)
        : Error("empty kernel neighborhood at query " + query +
                (index ? " (index " + std::to_string(*index) + ")" : std::string{})),
          query_(std::move(query)), index_(index) {}

    const std::string& query() const noexcept { return query_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    std::string query_;
    std::optional<std::size_t> index_;
};

/// The partially linear fit is undefined because a sample point has an empty neighborhood.
class FitUndefined : public Error {
public:
    explicit FitUndefined(std::size_t index)
        : Error("fit undefined: empty kernel neighborhood at observation " + std::to_string(index)),
          index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class CollinearDesign : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NoFeasibleBandwidth : public Error {
public:
    using Error::Error;
};

/// Too many Monte Carlo replications failed.
class UnstableDesign : public Error {
public:
    using Error::Error;
};

/// Malformed input file. `row` is 1-based and counts data rows (header excluded).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

}  // namespace rplm
