#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace osbm {

enum class ErrorCode {
  NonPositiveParameter,
  NonFiniteParameter,
  SigmaRatioViolation,
  DriftGapViolation,
  NonPositiveTime,
  NegativeLevel,
  NonPositiveLambda,
  NonPositiveHorizon,
  QuadratureNonConvergence,
  GridExhausted,
  HorizonExceeded,
  EmptySample,
  UnknownSuite,
  BudgetExceeded,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is the
/// machine-readable part; `what()` carries a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parameter validation failure naming the offending field.
class ParameterError : public Error {
 public:
  ParameterError(ErrorCode code, std::string name)
      : Error(code, name), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(double best_estimate, double error_estimate);

  double best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return err_; }

 private:
  double best_;
  double err_;
};

}  // namespace osbm
