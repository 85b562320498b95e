#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mhmp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitNotInClass = 2;
inline constexpr int kExitNotPSD = 3;
inline constexpr int kExitNonSimplePole = 4;
inline constexpr int kExitUsage = 64;

/// Runs one command; args excludes the program name. Reports go to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mhmp::cli
