#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracstar/config.hpp"

namespace fracstar {

/// Command-line overrides layered on top of the configuration file.
struct CommandOptions {
  std::optional<std::string> out_dir;
  std::optional<double> tol;
  std::optional<std::size_t> max_iter;
  std::optional<std::string> levels;  // "N0xM0,N1xM1,..."
  std::optional<std::uint64_t> seed;
};

/// Parses a refinement ladder "64x32,128x64,..." into (intervals, steps)
/// pairs. Throws ConfigError on malformed input.
std::vector<std::pair<std::size_t, std::size_t>> parse_levels(
    const std::string& text);

/// Runs one batch command (solve-direct, solve-inverse, check-k1,
/// verify-operators, convergence) against the config, writing artifacts
/// under the output directory. Progress goes to `log`; errors are also
/// recorded in summary.json. Returns the process exit code: 0 success,
/// 1 invalid input or infeasible problem, 2 divergence or iteration budget
/// exhausted.
int run_command(const std::string& command, Config cfg,
                const CommandOptions& options, std::ostream& log);

}  // namespace fracstar
