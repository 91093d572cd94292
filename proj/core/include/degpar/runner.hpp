#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "degpar/config.hpp"

namespace degpar {

/// Exit statuses shared by every subcommand.
enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 1,
  exit_theory_refusal = 2,
  exit_numerical_failure = 3,
};

struct RunOptions {
  std::string subcommand;
  std::string config_path;                    // empty: built-in defaults
  std::optional<std::string> out_override;    // --out
  std::optional<std::uint64_t> seed_override; // --seed
  int threads = 1;                            // --threads
};

/// Dispatch one subcommand (classify, solve, weights, carleman-scan,
/// observability, control, suite). Artifacts (CSV tables plus summary.json
/// embedding the resolved config) land in the output directory; diagnostics go
/// to `log`.
int run(const RunOptions& opts, std::ostream& log);

}  // namespace degpar
