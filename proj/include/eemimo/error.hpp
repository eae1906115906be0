#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eemimo {

enum class ErrorKind {
  invalid_input,     // argument violates a type invariant or precondition
  infeasible,        // demanded rate unachievable at any transmit power
  out_of_range,      // result overflowed or underflowed double precision
  unbounded,         // search domain is unbounded without an explicit k_max
  hypotheses_unmet,  // a result's preconditions do not hold
  inconsistent,      // two routes to the same quantity disagree
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input:
      return "invalid_input";
    case ErrorKind::infeasible:
      return "infeasible";
    case ErrorKind::out_of_range:
      return "out_of_range";
    case ErrorKind::unbounded:
      return "unbounded";
    case ErrorKind::hypotheses_unmet:
      return "hypotheses_unmet";
    case ErrorKind::inconsistent:
      return "inconsistent";
  }
  return "unknown";
}

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace eemimo
