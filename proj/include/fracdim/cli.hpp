#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracdim {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitViolation = 3;
inline constexpr int kExitNoScales = 4;

// Runs the command line; args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracdim
