#pragma once

#include <stdexcept>
#include <string>

namespace priceopt {

/// Malformed input: length mismatches, non-finite entries, broken sparse structure.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values or a linear solver that failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive routines refuse instances above their hard size limits.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or syntactically malformed file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file parsed fine but the instance it describes breaks a data invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, written or renamed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace priceopt
