#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agentplan {

enum class ErrorCode {
  InvalidArgument,
  UnboundedCycle,
  CyclicGraph,
  PortMismatch,
  SyntaxError,
  DuplicateId,
  UnknownKind,
  UnknownReference,
  UnknownModel,
  UnknownClass,
  MissingTokenCounts,
  PlanMismatch,
  MissingTdp,
  ModelTooLarge,
  ZeroPerf,
  ShapeMismatch,
  NonlinearConstraint,
  Infeasible,
  Unbounded,
  CycleLimit,
  BudgetExceeded,
  TooLarge,
  BaselineInfeasible,
  BaselineMissing,
  InvalidPlan,
  ZeroDuration,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error raised by every module. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace agentplan
