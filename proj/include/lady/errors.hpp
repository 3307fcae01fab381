#pragma once

#include <stdexcept>
#include <string>

namespace lady {

// Bad user-supplied configuration (flags, hyperparameters, shapes).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data.
struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure inside a solver (non-PSD covariance, divergence, ...).
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lady
