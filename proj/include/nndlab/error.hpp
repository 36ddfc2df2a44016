#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nndlab {

/// Violated precondition on caller-supplied arguments.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Arguments are well formed but the mathematical object does not exist
/// (non-concordant ranking system, K too small for the dimension, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Refusal to run a computation whose size would explode.
class ResourceRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal invariant broken; indicates a bug, not bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nndlab
