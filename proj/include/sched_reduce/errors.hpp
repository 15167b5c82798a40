#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sched_reduce {

enum class ErrorCode {
  InvalidInstance,
  CycleDetected,
  JobSetMismatch,
  MachineOutOfRange,
  EmptySchedule,
  DegenerateInstance,
  InfeasibleInput,
  CoLocationViolated,
  MakespanTooLarge,
  NonUnitLengths,
  InvalidCertificate,
  MisplacedFractionExceeded,
  PropertyViolated,
  IterationBudgetExceeded,
  TooManyJobsPerSlot,
  PreconditionGamma,
  BudgetExceeded,
  DivisibilityError,
  TooLargeToMaterialize,
  Parse,
  Io,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::JobSetMismatch: return "JobSetMismatch";
    case ErrorCode::MachineOutOfRange: return "MachineOutOfRange";
    case ErrorCode::EmptySchedule: return "EmptySchedule";
    case ErrorCode::DegenerateInstance: return "DegenerateInstance";
    case ErrorCode::InfeasibleInput: return "InfeasibleInput";
    case ErrorCode::CoLocationViolated: return "CoLocationViolated";
    case ErrorCode::MakespanTooLarge: return "MakespanTooLarge";
    case ErrorCode::NonUnitLengths: return "NonUnitLengths";
    case ErrorCode::InvalidCertificate: return "InvalidCertificate";
    case ErrorCode::MisplacedFractionExceeded: return "MisplacedFractionExceeded";
    case ErrorCode::PropertyViolated: return "PropertyViolated";
    case ErrorCode::IterationBudgetExceeded: return "IterationBudgetExceeded";
    case ErrorCode::TooManyJobsPerSlot: return "TooManyJobsPerSlot";
    case ErrorCode::PreconditionGamma: return "PreconditionGamma";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DivisibilityError: return "DivisibilityError";
    case ErrorCode::TooLargeToMaterialize: return "TooLargeToMaterialize";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace sched_reduce
