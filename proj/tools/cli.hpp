#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "seabed/error.hpp"

namespace seabed::cli {

inline constexpr int kExitOk = 0;
/// Replay produced different bytes, or an unexpected exception escaped.
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitNumerical = 4;

int exit_code(ErrorKind kind);

/// Runs one subcommand; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace seabed::cli
