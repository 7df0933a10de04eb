#pragma once

// Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace logdiff {

struct CommandResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

// args excludes the program name.
CommandResult run_command(const std::vector<std::string>& args);

struct SelftestSummary {
  int passed = 0;
  int failed = 0;
  std::string report;
};

SelftestSummary run_selftest(std::uint64_t seed, bool quick);

}  // namespace logdiff
