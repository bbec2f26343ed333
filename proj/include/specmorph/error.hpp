#pragma once

#include <stdexcept>
#include <string>

namespace specmorph {

// Error taxonomy shared across the library. The CLI maps kinds to exit codes.
enum class ErrorKind {
  unbound_symbol,
  domain_error,
  overflow,
  parse_error,
  unsupported_shape,
  singular_transform,
  not_proportional,
  no_match,
  no_closed_form,
  no_bound_states,
  parameter_out_of_range,
  convergence_failure,
  interpolation_out_of_range,
  singular_system,
  not_found,
  invalid_coupling,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::unbound_symbol: return "UnboundSymbol";
    case ErrorKind::domain_error: return "DomainError";
    case ErrorKind::overflow: return "Overflow";
    case ErrorKind::parse_error: return "ParseError";
    case ErrorKind::unsupported_shape: return "UnsupportedShape";
    case ErrorKind::singular_transform: return "SingularTransform";
    case ErrorKind::not_proportional: return "NotProportional";
    case ErrorKind::no_match: return "NoMatch";
    case ErrorKind::no_closed_form: return "NoClosedForm";
    case ErrorKind::no_bound_states: return "NoBoundStates";
    case ErrorKind::parameter_out_of_range: return "ParameterOutOfRange";
    case ErrorKind::convergence_failure: return "ConvergenceFailure";
    case ErrorKind::interpolation_out_of_range: return "InterpolationOutOfRange";
    case ErrorKind::singular_system: return "SingularSystem";
    case ErrorKind::not_found: return "NotFound";
    case ErrorKind::invalid_coupling: return "InvalidCoupling";
  }
  return "Error";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace specmorph
