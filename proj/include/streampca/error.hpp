#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace streampca {

enum class Errc {
  InvalidMatrix,
  NoConvergence,
  ZeroVector,
  DimensionMismatch,
  InvalidSample,
  DegenerateUpdate,
  SchemeMismatch,
  InadmissibleSchedule,
  InvalidSpectrum,
  InsufficientSamples,
  IoError,
  ParseError,
  EmptyStream,
  InsufficientData,
  DegenerateGap,
  GridMismatch,
  InvalidConfig,
};

std::string_view to_string(Errc code) noexcept;

/// Library error. Every failure raised by streampca carries one of the Errc
/// codes so callers (and the CLI exit-code mapping) can branch on the kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace streampca
