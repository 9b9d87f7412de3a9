#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdual {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  NotPsd,
  NotOrthonormal,
  NonFinite,
  ZeroSequence,
  DimensionMismatch,
  SingularAction,
  QTooLarge,
  QInverseTooLarge,
  QSingular,
  RankMismatch,
  BoundsMismatch,
  CertificationFailed,
  ParseError,
  ShapeError,
  ValueError,
  BadSpec,
  UsageError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroSequence: return "ZeroSequence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularAction: return "SingularAction";
    case ErrorCode::QTooLarge: return "QTooLarge";
    case ErrorCode::QInverseTooLarge: return "QInverseTooLarge";
    case ErrorCode::QSingular: return "QSingular";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::BoundsMismatch: return "BoundsMismatch";
    case ErrorCode::CertificationFailed: return "CertificationFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::ValueError: return "ValueError";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this exception; `code()`
/// identifies the violated contract, `what()` carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rdual
