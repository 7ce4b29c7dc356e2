#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ealab::cli {

// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerification = 2;
inline constexpr int kExitIo = 3;

// Fixed default master seed; never time-based.
inline constexpr std::uint64_t kDefaultSeed = 1234567;

// Runs one invocation: args are the command-line arguments without the
// program name, e.g. {"bounds", "--n", "100"}.  Returns the exit status.
int dispatch(const std::vector<std::string>& args);

}  // namespace ealab::cli
