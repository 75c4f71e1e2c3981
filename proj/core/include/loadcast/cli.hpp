#pragma once

#include <string>
#include <vector>

namespace loadcast {

/// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical
/// failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point of the command-line front end (subcommands: stats, train,
/// forecast, evaluate, gradcheck). Usable in-process by tests.
int cli_main(const std::vector<std::string>& args);
int cli_main(int argc, char** argv);

} // namespace loadcast
