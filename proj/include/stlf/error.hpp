#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stlf {

// Every failure the library can report. The numeric value doubles as the CLI
// exit status, so values are stable once published.
enum class ErrorCode : int {
  // data
  MalformedRow = 10,
  GapTooLarge = 11,
  NonHourlySpacing = 12,
  EmptyFile = 13,
  BoundaryOutOfRange = 14,
  DegenerateRange = 15,
  SeriesTooShort = 16,
  // nn
  ShapeMismatch = 20,
  KernelLargerThanInput = 21,
  WindowLargerThanInput = 22,
  MissingForwardCache = 23,
  // training
  LengthMismatch = 30,
  Empty = 31,
  EmptyDataset = 32,
  DivergedLoss = 33,
  InvalidConfig = 34,
  // eval
  NormMissing = 40,
  UnknownReference = 41,
  // io / cli
  Io = 50,
  BadCheckpoint = 51,
  BadConfig = 52,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stlf
