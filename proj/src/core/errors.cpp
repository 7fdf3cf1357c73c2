#include "emscat/errors.hpp"

namespace emscat {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::ZeroDirection: return "zero-direction";
    case ErrorCode::Range: return "range";
    case ErrorCode::NoRoot: return "no-root";
    case ErrorCode::NotContractive: return "not-contractive";
    case ErrorCode::NoConvergence: return "no-convergence";
    case ErrorCode::Quadrature: return "quadrature";
    case ErrorCode::StepFailure: return "step-failure";
    case ErrorCode::Coverage: return "coverage";
    case ErrorCode::OffManifold: return "off-manifold";
    case ErrorCode::StepUnderflow: return "step-underflow";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace emscat
