#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hexhadron {

enum class ErrorKind {
  SizeCapExceeded,
  DimensionMismatch,
  DuplicateIndexName,
  UnknownIndex,
  EmptyPartition,
  NumericalFailure,
  NotHermitian,
  NegativeSpectrum,
  ZeroTrace,
  NonPositiveNorm,
  NonUnitaryGate,
  StaleMessages,
  ImaginaryResidueTooLarge,
  NonPositiveJ,
  WindowOutOfRange,
  NonUniformSampling,
  ChainNormNonPositive,
  InvalidArgument,
  ConfigError,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DuplicateIndexName: return "DuplicateIndexName";
    case ErrorKind::UnknownIndex: return "UnknownIndex";
    case ErrorKind::EmptyPartition: return "EmptyPartition";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NegativeSpectrum: return "NegativeSpectrum";
    case ErrorKind::ZeroTrace: return "ZeroTrace";
    case ErrorKind::NonPositiveNorm: return "NonPositiveNorm";
    case ErrorKind::NonUnitaryGate: return "NonUnitaryGate";
    case ErrorKind::StaleMessages: return "StaleMessages";
    case ErrorKind::ImaginaryResidueTooLarge: return "ImaginaryResidueTooLarge";
    case ErrorKind::NonPositiveJ: return "NonPositiveJ";
    case ErrorKind::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorKind::NonUniformSampling: return "NonUniformSampling";
    case ErrorKind::ChainNormNonPositive: return "ChainNormNonPositive";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hexhadron
