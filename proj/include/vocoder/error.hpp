#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vocoder {

/// Bad argument or precondition violation (out-of-range alpha, negative bin, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed serialized input. Carries the byte offset where parsing failed.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class ChecksumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Autocorrelation with r0 <= 0, or a filter too close to instability to evaluate.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite value produced inside the synthesis loop.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::size_t sample_index)
        : std::runtime_error(what + " at sample " + std::to_string(sample_index)),
          sample_index_(sample_index) {}

    std::size_t sample_index() const noexcept { return sample_index_; }

private:
    std::size_t sample_index_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace vocoder
