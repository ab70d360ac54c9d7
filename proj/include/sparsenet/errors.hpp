#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparsenet {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inconsistent shapes, dimensions or configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller broke a precondition that the types cannot express,
/// e.g. passing a trace produced by a different network.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Training produced a non-finite loss or parameter.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(std::size_t iteration, const std::string& what)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace sparsenet
