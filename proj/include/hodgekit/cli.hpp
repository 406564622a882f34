#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitValidation = 2;

/// Runs one subcommand; `args` excludes the program name. The JSON result
/// (or {"error": ...}) goes to `out`, one line, keys sorted.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace hk::cli
