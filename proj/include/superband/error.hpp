#pragma once

#include <stdexcept>
#include <string>

namespace superband {

/// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical health check failed: norm drift, route disagreement,
/// flux mismatch (CLI exit code 3).
class NumericalHealthError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The field has no interior super/sub local-momentum pair.
class NoExtremumError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// |psi|^2 underflowed below 1e-300 at a velocity query.
class NodeUnderflowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bisection could not bracket a sign change.
class BracketError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace superband
