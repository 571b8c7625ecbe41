#pragma once

#include <stdexcept>
#include <string>

namespace homog {

// Invalid argument or precondition violation (bad config, out-of-range scale, ...).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Iterative solver did not reach the requested tolerance; carries the last residual.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), last_residual(residual), iterations(iterations) {}
    double last_residual;
    int iterations;
};

// An exact discrete identity failed beyond its tolerance budget; signals an
// operator-convention bug rather than a numerical accident.
class ConsistencyError : public std::runtime_error {
public:
    explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace homog
