#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "scmocc/bench.hpp"
#include "scmocc/potential.hpp"
#include "scmocc/propagators.hpp"
#include "scmocc/scattering.hpp"
#include "scmocc/sesmap.hpp"

namespace scmocc::cli {

/// Flat `section.key = value` text. '#' starts a comment; blank lines are
/// ignored; a repeated key is an error.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& source = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  /// Overrides or adds a key (command-line flags).
  void set(const std::string& key, const std::string& value);

  std::optional<std::string> text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  std::optional<double> number(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  /// Comma- and/or whitespace-separated numbers.
  std::vector<double> numbers(const std::string& key) const;

  /// Throws ConfigError naming every key that was never read.
  void reject_unused() const;

  /// "key = value" lines in key order.
  std::string canonical() const;

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

struct RunConfig {
  std::variant<std::filesystem::path, AnalyticSpec> potential;
  GridSpec grid;
  std::vector<double> v0;
  double b = 1.0;
  double mu = 1.0;
  std::size_t initial_channel = 0;  // zero-based
  CollisionOptions collision;
  ScanOptions scan;
  bool ehrenfest = false;
  DeviceSpec device;
  LambdaPolicy lambda;
  PropagatorConfig device_propagator;
  std::size_t ses_samples_per_half = 2000;
  std::size_t bench_repetitions = 3;
  double bench_reference_dt = 1e-4;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 7;
  std::string hash;  // of the canonical config text

  std::string potential_description() const;
};

/// Builds a RunConfig. Every key must be recognised. Throws ConfigError.
RunConfig resolve(const ConfigFile& file);

/// Loads or builds the configured potential and checks channel indices.
DiabaticModel load_potential(const RunConfig& config);

}  // namespace scmocc::cli
