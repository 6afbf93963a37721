#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsproto {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad masses, unknown labels, inconsistent ids.
class ValidationError : public Error {
public:
    using Error::Error;
};

class FrameMismatchError : public ValidationError {
public:
    FrameMismatchError() : ValidationError("frame mismatch") {}
    using ValidationError::ValidationError;
};

// Dempster normalization impossible: every product of focal masses has an
// empty intersection.
class TotalConflictError : public Error {
public:
    TotalConflictError() : Error("total conflict") {}
    using Error::Error;
};

class UnrepresentableSubsetError : public Error {
public:
    explicit UnrepresentableSubsetError(std::size_t subset)
        : Error("subset unrepresentable: subset " + std::to_string(subset + 1) +
                " received no potential prototypes"),
          subset_(subset) {}

    std::size_t subset() const noexcept { return subset_; }

private:
    std::size_t subset_;
};

}  // namespace dsproto
