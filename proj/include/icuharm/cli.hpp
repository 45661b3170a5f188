#pragma once

#include "icuharm/config.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace icuharm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs the command line `args` (without the program name). Results go to
/// `out`; diagnostics and errors go to `err`.
int run_cli(const std::vector<std::string>& args, const Env& env, std::ostream& out, std::ostream& err);

}  // namespace icuharm
