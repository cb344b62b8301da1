#pragma once

#include <stdexcept>
#include <string>

namespace toric {

enum class ErrorCode {
  Unbounded,          // normals do not positively span
  OriginNotInterior,  // 0 fails to be strictly inside
  NotLatticeForm,     // facet at lattice distance != 1, cannot hold <l,x> <= 1 with primitive integer l
  DimTooLarge,        // enumeration budget would be exceeded
  BudgetExceeded,
  NonconvexInput,
  MassTooLarge,
  DomainMismatch,
  SupportUnbounded,
  MaxIter,
  GridTooCoarse,
  InputError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Unbounded: return "UNBOUNDED";
    case ErrorCode::OriginNotInterior: return "ORIGIN_NOT_INTERIOR";
    case ErrorCode::NotLatticeForm: return "NOT_LATTICE_FORM";
    case ErrorCode::DimTooLarge: return "DIM_TOO_LARGE";
    case ErrorCode::BudgetExceeded: return "BUDGET_EXCEEDED";
    case ErrorCode::NonconvexInput: return "NONCONVEX_INPUT";
    case ErrorCode::MassTooLarge: return "MASS_TOO_LARGE";
    case ErrorCode::DomainMismatch: return "DOMAIN_MISMATCH";
    case ErrorCode::SupportUnbounded: return "SUPPORT_UNBOUNDED";
    case ErrorCode::MaxIter: return "MAX_ITER";
    case ErrorCode::GridTooCoarse: return "GRID_TOO_COARSE";
    case ErrorCode::InputError: return "INPUT_ERROR";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

}  // namespace toric
