#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fdh {

enum class Errc {
  NotSelfAdjoint,
  NotNegativeDefinite,
  ZeroNoiseMode,
  InvalidMeasure,
  InvalidExponent,
  InvalidCoefficients,
  NonFiniteState,
  BlowupLimitExceeded,
  InvalidP,
  ZeroHorizon,
  EmptySample,
  InvalidSampleCount,
  NotTimeHomogeneous,
  PositiveGamma,
  InvalidArgument,
  SchemaError,
  IOError,
};

std::string_view errc_name(Errc code) noexcept;

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NotSelfAdjoint: return "NotSelfAdjoint";
    case Errc::NotNegativeDefinite: return "NotNegativeDefinite";
    case Errc::ZeroNoiseMode: return "ZeroNoiseMode";
    case Errc::InvalidMeasure: return "InvalidMeasure";
    case Errc::InvalidExponent: return "InvalidExponent";
    case Errc::InvalidCoefficients: return "InvalidCoefficients";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::BlowupLimitExceeded: return "BlowupLimitExceeded";
    case Errc::InvalidP: return "InvalidP";
    case Errc::ZeroHorizon: return "ZeroHorizon";
    case Errc::EmptySample: return "EmptySample";
    case Errc::InvalidSampleCount: return "InvalidSampleCount";
    case Errc::NotTimeHomogeneous: return "NotTimeHomogeneous";
    case Errc::PositiveGamma: return "PositiveGamma";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::SchemaError: return "SchemaError";
    case Errc::IOError: return "IOError";
  }
  return "Unknown";
}

}  // namespace fdh
