// errors.hpp — exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace gpd {

// Input outside the validity domain of an operation (poles, negative times, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Adaptive scheme ran out of budget. Carries the best estimate reached so far.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, double best, double err)
        : std::runtime_error(msg), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

// Eigenvalue spectrum too close to degenerate for branch tracking.
class DegeneracyError : public std::runtime_error {
public:
    DegeneracyError(const std::string& msg, double t)
        : std::runtime_error(msg), at_time(t) {}
    double at_time;
};

// Bad configuration value; message names the offending field.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

} // namespace gpd
