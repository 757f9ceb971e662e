#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtstat {

/// Base class for all rtstat errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Fewer symbols than one block requires.
struct EmptyInputError : Error {
    using Error::Error;
};

/// A parameter (k, n, order, tolerance, ...) is outside its documented range.
struct DomainError : Error {
    using Error::Error;
};

/// The key space A^ell is too small to assign k distinct target values.
struct AlphabetTooSmallError : Error {
    using Error::Error;
};

/// A statistic was asked to consume censored return times. Carries the
/// offending 1-based indices.
struct CensoredDataError : Error {
    std::vector<std::size_t> indices;
    CensoredDataError(const std::string& what, std::vector<std::size_t> idx)
        : Error(what), indices(std::move(idx)) {}
};

/// The covariance correction would make the variance estimate non-positive.
struct CorrectionInvalidError : Error {
    using Error::Error;
};

/// Numeric tails failed to converge under the supplied decay certificate.
struct NonIntegrableError : Error {
    using Error::Error;
};

/// The conditioning probabilities sum to >= 1, so the sandwich bound is
/// undefined.
struct InvalidMassError : Error {
    using Error::Error;
};

/// Too many Monte Carlo trials were censored to report a trustworthy sample.
struct CensoringBudgetError : Error {
    std::size_t censored;
    std::size_t trials;
    CensoringBudgetError(const std::string& what, std::size_t c, std::size_t t)
        : Error(what), censored(c), trials(t) {}
};

/// A digit file contained a byte that is neither a digit of the alphabet nor
/// an ignorable separator.
struct BadCharacterError : Error {
    std::uint64_t offset;
    unsigned char byte;
    BadCharacterError(const std::string& what, std::uint64_t off, unsigned char b)
        : Error(what), offset(off), byte(b) {}
};

/// A digit file produced no symbols at all.
struct EmptyFileError : Error {
    using Error::Error;
};

/// A file could not be opened or read.
struct FileError : Error {
    using Error::Error;
};

/// The process model has zero information variance, so the Wyner statistic
/// is undefined.
struct ZeroVarianceError : Error {
    using Error::Error;
};

/// A prefix-uniqueness length could not be resolved within the available
/// data. Carries the 1-based start position.
struct UnresolvedError : Error {
    std::size_t index;
    UnresolvedError(const std::string& what, std::size_t i) : Error(what), index(i) {}
};

}  // namespace rtstat
