#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gslms {

/// Vector or partition sizes that do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A scalar hyperparameter outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Broken invariant inside the variable-parameter model (e.g. g <= 0, NaN moments).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition of a numerical oracle violated.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed configuration file or command line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filter weights became non-finite.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::int64_t iteration, const std::string& what)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    std::int64_t iteration() const noexcept { return iteration_; }

private:
    std::int64_t iteration_;
};

} // namespace gslms
