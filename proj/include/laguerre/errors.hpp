#pragma once

#include <stdexcept>
#include <string>

namespace laguerre {

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The caller combined arguments in a way the operation does not support.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation requested on the diagonal of a singular kernel.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace laguerre
