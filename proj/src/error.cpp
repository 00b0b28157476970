#include "radar_odom/error.hpp"

namespace radar_odom {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kContractViolation: return "contract violation";
    case ErrorCode::kNoCandidates: return "no candidates";
    case ErrorCode::kDegenerateProblem: return "degenerate problem";
    case ErrorCode::kNoCompatibilityStructure: return "no compatibility structure";
    case ErrorCode::kUnderdetermined: return "underdetermined";
    case ErrorCode::kDegenerateGeometry: return "degenerate geometry";
    case ErrorCode::kMatchFailure: return "match failure";
    case ErrorCode::kIcpDiverged: return "ICP diverged";
    case ErrorCode::kTimestampMismatch: return "timestamp mismatch";
    case ErrorCode::kIo: return "I/O error";
    case ErrorCode::kConfig: return "config error";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void throw_error(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace radar_odom
