#include "stlf/error.hpp"

namespace stlf {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::GapTooLarge: return "GapTooLarge";
    case ErrorCode::NonHourlySpacing: return "NonHourlySpacing";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::BoundaryOutOfRange: return "BoundaryOutOfRange";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::KernelLargerThanInput: return "KernelLargerThanInput";
    case ErrorCode::WindowLargerThanInput: return "WindowLargerThanInput";
    case ErrorCode::MissingForwardCache: return "MissingForwardCache";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NormMissing: return "NormMissing";
    case ErrorCode::UnknownReference: return "UnknownReference";
    case ErrorCode::Io: return "Io";
    case ErrorCode::BadCheckpoint: return "BadCheckpoint";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

}  // namespace stlf
