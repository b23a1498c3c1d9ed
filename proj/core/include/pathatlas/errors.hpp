#pragma once

#include <stdexcept>
#include <string>

namespace pathatlas {

/// Precondition or argument violation (bad sizes, invalid weights, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point left the admissible domain of a map. For lifted (nodewise)
/// operations the offending time node is recorded.
class DomainViolation : public std::runtime_error {
 public:
  explicit DomainViolation(const std::string& what, long node = -1)
      : std::runtime_error(what), node_index(node) {}
  long node_index;
};

/// An iterative solve did not reach its tolerance within budget.
class SolveFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PATHATLAS_REQUIRE(cond, msg)            \
  do {                                          \
    if (!(cond)) throw ::pathatlas::InvalidArgument(msg); \
  } while (0)

}  // namespace pathatlas
