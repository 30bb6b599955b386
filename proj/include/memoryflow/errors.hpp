#pragma once

#include <stdexcept>
#include <string>

namespace memoryflow {

/// Input outside the mathematical domain of an operation (bad η, |κ| > 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configured resource cap (series degree, node budget, oracle size) would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested parameter combination is not covered by the closed form.
class UnsupportedCase : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace memoryflow
