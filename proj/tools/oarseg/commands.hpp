#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace oarseg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitInternal = 70;

/// Entry point of the `oarseg` tool; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Convenience wrapper taking the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oarseg::cli
