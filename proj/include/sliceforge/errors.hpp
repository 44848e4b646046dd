#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sliceforge {

enum class ErrorCode {
  ZeroDivision,
  NotAUnit,
  CoincidentUnits,
  OutsideRadius,
  OutsideDomain,
  OnRealAxis,
  RealAxisMismatch,
  EmptyGrid,
  GridMismatch,
  PointOutsideRegion,
  NonpositiveDistance,
  InvalidWidth,
  InvalidSail,
  InvalidConfig,
  PointOutsideDomain,
  OutsideDJK,
  CapDisagreement,
  OutsideCompletion,
  InconsistentExtension,
  NoSecondUnit,
  TooCloseToBoundary,
  NotSpeared,
  InternalInconsistency,
};

inline std::string_view error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::ZeroDivision: return "ZeroDivision";
    case ErrorCode::NotAUnit: return "NotAUnit";
    case ErrorCode::CoincidentUnits: return "CoincidentUnits";
    case ErrorCode::OutsideRadius: return "OutsideRadius";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::OnRealAxis: return "OnRealAxis";
    case ErrorCode::RealAxisMismatch: return "RealAxisMismatch";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::PointOutsideRegion: return "PointOutsideRegion";
    case ErrorCode::NonpositiveDistance: return "NonpositiveDistance";
    case ErrorCode::InvalidWidth: return "InvalidWidth";
    case ErrorCode::InvalidSail: return "InvalidSail";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::OutsideDJK: return "OutsideDJK";
    case ErrorCode::CapDisagreement: return "CapDisagreement";
    case ErrorCode::OutsideCompletion: return "OutsideCompletion";
    case ErrorCode::InconsistentExtension: return "InconsistentExtension";
    case ErrorCode::NoSecondUnit: return "NoSecondUnit";
    case ErrorCode::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorCode::NotSpeared: return "NotSpeared";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sliceforge
