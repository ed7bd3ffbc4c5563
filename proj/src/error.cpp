#include "fevolve/error.hpp"

namespace fevolve {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConformingSpacing: return "NonConformingSpacing";
    case ErrorCode::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::FactorizationFailed: return "FactorizationFailed";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NonSPDTensor: return "NonSPDTensor";
    case ErrorCode::ActionFailure: return "ActionFailure";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::EigensolveFailure: return "EigensolveFailure";
    case ErrorCode::InconsistentFamily: return "InconsistentFamily";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::SingularOperator: return "SingularOperator";
    case ErrorCode::ContractionConditionViolated: return "ContractionConditionViolated";
    case ErrorCode::BallEscape: return "BallEscape";
    case ErrorCode::InvalidConstants: return "InvalidConstants";
    case ErrorCode::MissingConstants: return "MissingConstants";
    case ErrorCode::WindowExceedsDelta: return "WindowExceedsDelta";
    case ErrorCode::IndexOutOfWindow: return "IndexOutOfWindow";
    case ErrorCode::NotContractive: return "NotContractive";
    case ErrorCode::SeriesOverflow: return "SeriesOverflow";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {
std::string format_message(ErrorCode code, std::string_view module, const std::string& detail) {
  std::string msg(module);
  msg += ": ";
  msg += to_string(code);
  if (!detail.empty()) {
    msg += ": ";
    msg += detail;
  }
  return msg;
}
}  // namespace

Error::Error(ErrorCode code, std::string_view module, const std::string& detail)
    : std::runtime_error(format_message(code, module, detail)), code_(code), module_(module) {}

}  // namespace fevolve
