#include "core/errors.hpp"

namespace lbdd {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularBasis: return "SingularBasis";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kWidthTooSmall: return "WidthTooSmall";
    case ErrorCode::kInsufficientInput: return "InsufficientInput";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kOutOfDomain: return "OutOfDomain";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Unknown";
}

}  // namespace lbdd
