#pragma once

#include <stdexcept>
#include <string>

namespace spectral_limits {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (negative radius, p < 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment, density or manifold configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Structural problem with a graph: isolated vertex, zero vertex weight, disconnected input.
class GraphError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver or ODE solver failed to reach the requested accuracy.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace spectral_limits
