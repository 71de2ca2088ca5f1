#pragma once

#include <stdexcept>
#include <string>

namespace sgtraffic {

/// Bad input: wrong dimensions, unsupported basis, out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver hit a state it cannot continue from (singular Galerkin matrix,
/// overlapping vehicles, CFL violation, density leaving its admissible range).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration text could not be turned into a valid experiment.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input or output file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sgtraffic
