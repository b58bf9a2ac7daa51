#pragma once

#include <stdexcept>
#include <string>

namespace chinpaint {

enum class ErrorCode {
  InvalidArgument,
  GridMismatch,
  NonZeroMean,
  NonBinaryMask,
  NoRoot,
  PicardDiverged,
  NonFinite,
  TrajectoryMismatch,
  Alpha2NotZero,
  BoxViolation,
  LineSearchFailed,
  NotStationary,
  UnsupportedFormat,
  DimensionMismatch,
  EmptyOrFullMask,
  Io,
  Config,
};

const char* to_string(ErrorCode code) noexcept;

// %.6g, for messages.
std::string num(double v);

// Numerical failures map to exit code 3 in the CLI, everything else to 2.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace chinpaint
