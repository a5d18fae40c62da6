#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plnav {

enum class ErrorCode {
  kInvalidInput,
  kGeometry,
  kUnderdetermined,
  kImuGap,
  kConfig,
  kIo,
  kEpochMismatch,
  kSolver,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a stable, machine-readable code next to the message.
class NavError : public std::runtime_error {
 public:
  NavError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace plnav
