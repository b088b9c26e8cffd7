#pragma once

#include <stdexcept>
#include <string>

namespace qdmft {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operand shapes disagree (qubit counts, vector lengths).
struct DimensionError : Error {
  using Error::Error;
};

// Out-of-range or inconsistent input parameter.
struct ParameterError : Error {
  using Error::Error;
};

// A circuit or objective could not be evaluated.
struct EvaluationError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct RegularizationError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qdmft
