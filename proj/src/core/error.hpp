#pragma once

#include <stdexcept>
#include <string>

namespace gsa {

enum class ErrorKind {
  InvalidArgument,  // bad parameter or malformed spec
  Degenerate,       // sample/statistic degenerate (constant data, zero variance)
  Calibration,      // calibration pipeline failure (too few samples, zero MDE, ...)
  Numeric,          // non-finite values, solver breakdown
  State,            // misuse of a stateful object (step after alarm)
  Parse,            // JSON/CSV parse failure
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace gsa
