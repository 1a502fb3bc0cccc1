#pragma once

#include <stdexcept>
#include <string>

namespace recomb {

// Bad user input: unreadable files, malformed records, invalid config.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Failure inside a computation: non-convergence, rank deficiency,
// undefined quantities. The CLI maps this to exit code 1.
class ComputeError : public std::runtime_error {
 public:
  explicit ComputeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace recomb
