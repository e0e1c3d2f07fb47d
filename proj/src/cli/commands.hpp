#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace holo::cli {

inline constexpr const char* kToolVersion = "holocurrent 1.0.0";

/// Parses argv (argv[0] is the program name), runs the subcommand, writes the
/// ResultDocument to `out` and messages to `err`. Returns the exit code:
/// 0 success, 1 mathematical failure, 2 input/schema/I-O error, 3 numerical failure.
int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err, std::istream& in);

/// Human-readable rendering used by --pretty.
std::string pretty(const nlohmann::json& result);

}  // namespace holo::cli
