#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fevolve {

enum class ErrorCode {
  NonConformingSpacing,
  DimensionUnsupported,
  DimensionMismatch,
  FactorizationFailed,
  InsufficientSamples,
  NonSPDTensor,
  ActionFailure,
  NotSymmetric,
  EigensolveFailure,
  InconsistentFamily,
  DivergenceDetected,
  InvalidRatio,
  SingularOperator,
  ContractionConditionViolated,
  BallEscape,
  InvalidConstants,
  MissingConstants,
  WindowExceedsDelta,
  IndexOutOfWindow,
  NotContractive,
  SeriesOverflow,
  UnknownPreset,
  ConfigParse,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Library exception. `what()` reads "<module>: <Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string_view module, const std::string& detail);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace fevolve
