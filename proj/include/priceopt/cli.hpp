#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace priceopt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitCapacity = 3;
inline constexpr int kExitNumeric = 4;

inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// Entry point of the `priceopt` tool. Subcommands: gen, solve, oracle,
/// project, compare, export-mip, sweep, suite. The default seed can be
/// overridden with the SOLVER_SEED environment variable.
int run(int argc, char** argv);

/// Same, with arguments excluding the program name and explicit streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace priceopt::cli
