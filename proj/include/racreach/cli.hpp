#pragma once

// Command-line front end: analyze | bounds | tree | validate.

#include <ostream>
#include <string>
#include <vector>

namespace racreach {

/// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_model_error = 1;
inline constexpr int exit_analysis_error = 2;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace racreach
