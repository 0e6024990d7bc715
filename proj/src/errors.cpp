#include "dioph/errors.hpp"

namespace dioph {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::PrecisionExhausted: return "precision-exhausted";
    case ErrorKind::Domain: return "domain-error";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::BudgetExceeded: return "budget-exceeded";
    case ErrorKind::PreconditionViolated: return "precondition-violated";
    case ErrorKind::DriftDetected: return "drift-detected";
  }
  return "error";
}

}  // namespace dioph
