#pragma once

#include <stdexcept>
#include <string>

namespace sympen {

// Bad dimensions, bad parameter ranges, malformed arguments.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// File missing, unparsable, or with an unsupported layout.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Factorization breakdown, non-finite values, loss of rank.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown by the symplectic SVD when some symplectic singular values fall
// below the rank tolerance.
class RankDeficientError : public NumericalError {
public:
    RankDeficientError(const std::string& what, int deficient)
        : NumericalError(what), deficient_(deficient) {}

    int deficient() const noexcept { return deficient_; }

private:
    int deficient_;
};

} // namespace sympen
