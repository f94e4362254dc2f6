#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace demo2prog {

// Base classes map onto CLI exit codes: ConfigError -> 2,
// MissingInputError -> 3, NumericalError -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct UnreachableTargetError : NumericalError {
  using NumericalError::NumericalError;
};

struct ConvergenceError : NumericalError {
  using NumericalError::NumericalError;
};

struct StabilityError : NumericalError {
  using NumericalError::NumericalError;
};

struct DivergenceError : NumericalError {
  using NumericalError::NumericalError;
};

// All particle weights collapsed to zero (or NaN) at one inference step.
struct DegenerateWeightsError : NumericalError {
  explicit DegenerateWeightsError(std::size_t t)
      : NumericalError("degenerate particle weights at timestep " +
                       std::to_string(t)),
        timestep(t) {}
  std::size_t timestep;
};

struct GroundingFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct MatchNotFoundError : GroundingFailure {
  using GroundingFailure::GroundingFailure;
};

// Regrounding failed for a subset of symbols; the rest succeeded.
struct PartialGroundingError : GroundingFailure {
  PartialGroundingError(std::string msg, std::vector<int> ids)
      : GroundingFailure(std::move(msg)), failed_symbols(std::move(ids)) {}
  std::vector<int> failed_symbols;
};

}  // namespace demo2prog
