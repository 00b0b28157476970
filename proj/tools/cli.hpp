#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace radar_odom::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitMatchFailure = 4,
};

/// Runs one command line (without the program name). Never throws; errors
/// are reported on `err` and mapped onto ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace radar_odom::cli
