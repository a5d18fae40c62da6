#include "plnav/error.hpp"

namespace plnav {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid_input";
    case ErrorCode::kGeometry: return "geometry";
    case ErrorCode::kUnderdetermined: return "underdetermined";
    case ErrorCode::kImuGap: return "imu_gap";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kEpochMismatch: return "epoch_mismatch";
    case ErrorCode::kSolver: return "solver";
  }
  return "unknown";
}

}  // namespace plnav
