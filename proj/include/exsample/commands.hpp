#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace exsample {

// Shared command-line options. seed overrides the config's base seed.
struct CliOptions {
  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  std::string input_dir;  // report only: a completed simulate output
};

// Exit codes: 0 on success. Configuration problems (bad files, bad values,
// missing inputs) raise ConfigError, internal invariant violations raise
// std::logic_error; the binary maps them to 2 and 3.
int cmd_simulate(const CliOptions& options);
int cmd_validate_estimator(const CliOptions& options);
int cmd_optimal(const CliOptions& options);
int cmd_report(const CliOptions& options);

}  // namespace exsample
