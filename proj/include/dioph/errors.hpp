#pragma once

#include <stdexcept>
#include <string>

namespace dioph {

enum class ErrorKind {
  Parse,
  PrecisionExhausted,
  Domain,
  InvalidInput,
  BudgetExceeded,
  PreconditionViolated,
  DriftDetected,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

struct PrecisionPolicy {
  unsigned initial_bits = 128;
  unsigned cap_bits = 4096;
};

}  // namespace dioph
