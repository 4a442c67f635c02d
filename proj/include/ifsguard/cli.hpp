#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ifsguard::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kClean = 0, kUsage = 1, kViolation = 2, kIncomplete = 3 };

/// Runs one command line (args[0] is the program name). Output that a user
/// reads goes to `out`, errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Expands `name[7:0]`, `name[2]` and comma lists into single-bit names
/// (most significant first for descending ranges).
std::vector<std::string> expand_names(const std::vector<std::string>& specs);

}  // namespace ifsguard::cli
