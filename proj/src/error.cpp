#include "streampca/error.hpp"

namespace streampca {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidMatrix: return "InvalidMatrix";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidSample: return "InvalidSample";
    case Errc::DegenerateUpdate: return "DegenerateUpdate";
    case Errc::SchemeMismatch: return "SchemeMismatch";
    case Errc::InadmissibleSchedule: return "InadmissibleSchedule";
    case Errc::InvalidSpectrum: return "InvalidSpectrum";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
    case Errc::EmptyStream: return "EmptyStream";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::DegenerateGap: return "DegenerateGap";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace streampca
