#pragma once

#include <stdexcept>
#include <string>

namespace ellrisk {

enum class ErrorCode {
  ShapeConstraintViolated,
  NegativeArgument,
  IntegralDiverged,
  DomainError,
  DimensionMismatch,
  NotPositiveDefinite,
  RootNotBracketed,
  BandInvertedAfterStandardization,
  SingularCovariance,
  InsufficientData,
  AccuracyNotReached,
  EmptyBand,
  DegenerateVariance,
  TooFewAccepted,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ellrisk
