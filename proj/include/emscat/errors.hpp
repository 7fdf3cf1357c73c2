#pragma once

#include <stdexcept>
#include <string>

namespace emscat {

enum class ErrorCode {
  InvalidArgument = 1,
  Domain,          // |v| >= c and similar
  ZeroDirection,
  Range,           // bound parameters outside their admissible set
  NoRoot,
  NotContractive,
  NoConvergence,
  Quadrature,
  StepFailure,
  Coverage,
  OffManifold,
  StepUnderflow,
  Parse,
  Io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace emscat
