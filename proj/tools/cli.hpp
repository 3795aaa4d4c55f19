#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bcfar::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

// Runs one command line (without the program name). Results go to `out`,
// diagnostics and summaries to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bcfar::cli
