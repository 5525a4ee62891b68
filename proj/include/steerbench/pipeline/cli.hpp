#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace steerbench::pipeline {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitInternal = 4;

// Runs one command (`args` excludes the program name). Normal output goes
// to `out`; warnings and the single-line error go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace steerbench::pipeline
