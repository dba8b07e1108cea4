#pragma once

#include <stdexcept>
#include <string>

namespace lbdd {

enum class ErrorCode {
  kSingularBasis,
  kBudgetExceeded,
  kWidthTooSmall,
  kInsufficientInput,
  kNotConverged,
  kOutOfDomain,
  kInfeasible,
  kConfig,
  kIo,
  kParse,
};

const char* error_code_name(ErrorCode code);

// Base of every hard failure raised by the core. Soft outcomes (starvation,
// exhausted repetition budgets) are reported through result structs instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define LBDD_DEFINE_ERROR(Name, Code)                                 \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
  };

LBDD_DEFINE_ERROR(SingularBasis, kSingularBasis)
LBDD_DEFINE_ERROR(BudgetExceeded, kBudgetExceeded)
LBDD_DEFINE_ERROR(WidthTooSmall, kWidthTooSmall)
LBDD_DEFINE_ERROR(InsufficientInput, kInsufficientInput)
LBDD_DEFINE_ERROR(NotConverged, kNotConverged)
LBDD_DEFINE_ERROR(OutOfDomain, kOutOfDomain)
LBDD_DEFINE_ERROR(Infeasible, kInfeasible)
LBDD_DEFINE_ERROR(ConfigError, kConfig)
LBDD_DEFINE_ERROR(IoError, kIo)
LBDD_DEFINE_ERROR(ParseError, kParse)

#undef LBDD_DEFINE_ERROR

}  // namespace lbdd
