#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sketchid {

/// Raised for dimension mismatches, invalid parameters and malformed input.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical kernel cannot proceed (non-finite data, breakdown).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A triangular factor has an exactly zero diagonal entry.
class SingularError : public NumericalError {
public:
    explicit SingularError(std::size_t index)
        : NumericalError("singular triangular factor: zero diagonal at index " + std::to_string(index)),
          index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ArgumentError(message);
}

}  // namespace sketchid
