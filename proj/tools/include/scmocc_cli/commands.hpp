#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "scmocc_cli/config.hpp"

namespace scmocc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPhysics = 1;
inline constexpr int kExitConfig = 2;

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::size_t jobs = 0;  // 0: all hardware threads
  bool ehrenfest = false;
  std::optional<std::uint64_t> seed;
  bool dump_trajectory = false;
};

/// Loads the config file and applies the command-line overrides.
RunConfig prepare(const CommandOptions& options);

void cmd_run(const RunConfig& config, const CommandOptions& options, std::ostream& log);
void cmd_scan(const RunConfig& config, const CommandOptions& options, std::ostream& log);
void cmd_xsec(const RunConfig& config, const CommandOptions& options, std::ostream& log);
void cmd_ses(const RunConfig& config, const CommandOptions& options, std::ostream& log);
void cmd_bench(const RunConfig& config, const CommandOptions& options, std::ostream& log);

/// Runs one subcommand and maps failures to exit codes: ConfigError -> 2,
/// PhysicsError and other runtime failures -> 1. Messages go to `err`.
int dispatch(const std::string& command, const CommandOptions& options, std::ostream& log,
             std::ostream& err);

}  // namespace scmocc::cli
