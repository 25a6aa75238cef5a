#pragma once

#include <string>
#include <vector>

namespace vswalk {

// Exit codes: 0 success, 1 validation error, 2 numerical failure.
int run_cli(int argc, const char* const* argv);
// args excludes the program name.
int run_cli(const std::vector<std::string>& args);

// "a:b:N" (inclusive, N points) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);
std::vector<double> parse_number_list(const std::string& text);

}  // namespace vswalk
