#pragma once

#include <stdexcept>
#include <string>

namespace edtlab {

enum class ErrorCode {
  kNonPositiveInput,
  kInvalidArgument,
  kSingularParameter,
  kZeroPoleOffset,
  kOutOfRange,
  kTruncationFailure,
  kDivergentSeries,
  kIoFailure,
  kConfigError,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class EdtError : public std::runtime_error {
 public:
  EdtError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace edtlab
