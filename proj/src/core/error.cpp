#include "core/error.hpp"

#include <cstdio>

namespace chinpaint {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonZeroMean: return "NonZeroMean";
    case ErrorCode::NonBinaryMask: return "NonBinaryMask";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::PicardDiverged: return "PicardDiverged";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TrajectoryMismatch: return "TrajectoryMismatch";
    case ErrorCode::Alpha2NotZero: return "Alpha2NotZero";
    case ErrorCode::BoxViolation: return "BoxViolation";
    case ErrorCode::LineSearchFailed: return "LineSearchFailed";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyOrFullMask: return "EmptyOrFullMask";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoRoot:
    case ErrorCode::PicardDiverged:
    case ErrorCode::NonFinite:
    case ErrorCode::LineSearchFailed:
    case ErrorCode::NotStationary:
      return true;
    default:
      return false;
  }
}

}  // namespace chinpaint
