#pragma once

#include <stdexcept>
#include <string>

namespace relmap {

// Bad user input (malformed files, invalid parameters). CLI exit code 2.
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// MCMC diagnostic failure (non-finite state, constraint stall). CLI exit code 3.
class sampler_error : public std::runtime_error {
 public:
  explicit sampler_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical routine failed to converge. Never silently ignored.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace relmap
