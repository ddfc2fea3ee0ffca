#ifndef DBAR_ERRORS_HPP
#define DBAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dbar {

/// Misuse of an operation contract (mismatched arguments, unnormalized
/// weights, preconditions not met).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The chains are not stochastically ordered; the coupling is undefined.
class OrderViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The envelope mass product could not be certified strictly positive.
class ConditionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal hard caps reached (envelope depth, backtrack depth); signals a
/// chain pair whose regeneration structure is impractically weak.
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dbar

#endif  // DBAR_ERRORS_HPP
