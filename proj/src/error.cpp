#include "ellrisk/error.hpp"

namespace ellrisk {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeConstraintViolated: return "ShapeConstraintViolated";
    case ErrorCode::NegativeArgument: return "NegativeArgument";
    case ErrorCode::IntegralDiverged: return "IntegralDiverged";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::BandInvertedAfterStandardization: return "BandInvertedAfterStandardization";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::AccuracyNotReached: return "AccuracyNotReached";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::TooFewAccepted: return "TooFewAccepted";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace ellrisk
