#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radar_odom {

enum class ErrorCode {
  kContractViolation,
  kNoCandidates,
  kDegenerateProblem,
  kNoCompatibilityStructure,
  kUnderdetermined,
  kDegenerateGeometry,
  kMatchFailure,
  kIcpDiverged,
  kTimestampMismatch,
  kIo,
  kConfig,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code lets
/// callers (notably the CLI) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void throw_error(ErrorCode code, const std::string& what);

inline void require(bool condition, const char* what) {
  if (!condition) throw_error(ErrorCode::kContractViolation, what);
}

}  // namespace radar_odom
