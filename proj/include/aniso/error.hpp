#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aniso {

enum class Errc {
  InsufficientSamples,
  InvalidInput,
  PairMismatch,
  FormatError,
  DegenerateRow,
  InvalidSplit,
  DegenerateSpectrum,
  DegenerateResidual,
  InvalidFrame,
  DegenerateCovariance,
  RequiresPairs,
  InvalidConfig,
  TrainingDiverged,
  DependencyMissing,
  IoError,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::PairMismatch: return "PairMismatch";
    case Errc::FormatError: return "FormatError";
    case Errc::DegenerateRow: return "DegenerateRow";
    case Errc::InvalidSplit: return "InvalidSplit";
    case Errc::DegenerateSpectrum: return "DegenerateSpectrum";
    case Errc::DegenerateResidual: return "DegenerateResidual";
    case Errc::InvalidFrame: return "InvalidFrame";
    case Errc::DegenerateCovariance: return "DegenerateCovariance";
    case Errc::RequiresPairs: return "RequiresPairs";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::TrainingDiverged: return "TrainingDiverged";
    case Errc::DependencyMissing: return "DependencyMissing";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Library-wide exception. `code()` identifies the failure class; the message
/// carries the context (path, index, stage name).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace aniso
