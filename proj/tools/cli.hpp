#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dnsvec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (args[0] is the program name). Never throws;
/// every failure becomes a diagnostic on `err` (or a machine-readable
/// record on `out`) and a nonzero exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dnsvec::cli
