#pragma once

#include <stdexcept>
#include <string>

namespace qsdc {

// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The message does not fit in the pairs left over after the security checks.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Memory storage is shorter than T_o + L/c.
class TimingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qsdc
