#pragma once

#include <string>
#include <vector>

namespace lorasim::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming a default key=value config file.
inline constexpr const char* kConfigEnv = "LORASIM_CONFIG";

int run(int argc, char** argv);
/// args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace lorasim::cli
