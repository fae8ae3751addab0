#pragma once

#include "aniso/error.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aniso::cli {

/// Subcommands in pipeline order.
const std::vector<std::string>& command_names();

/// Flag values; unset flags fall back to the config file, then to defaults.
struct CliOptions {
  std::string command;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

/// Every key with its default value. Keys absent from this tree are rejected.
nlohmann::ordered_json default_config();

/// Effective configuration: defaults, overlaid by the config file, overlaid by
/// flags. InvalidConfig on unknown keys, wrong value types or a missing/
/// unparsable config file.
struct RunConfig {
  nlohmann::ordered_json values;
  std::filesystem::path out;

  const nlohmann::ordered_json& section(const std::string& name) const { return values.at(name); }
  std::uint64_t seed() const { return values.at("seed").get<std::uint64_t>(); }
};
RunConfig resolve_config(const CliOptions& options);

/// Runs one subcommand; throws aniso::Error on failure.
void run_command(const std::string& command, const RunConfig& config);

/// 0 success, 2 config error, 3 data or I/O error, 4 training divergence.
int exit_code(Errc code);

/// Resolves the config, applies the thread cap, runs the command and maps any
/// failure to its exit code, reporting it on stderr.
int run(const CliOptions& options);

/// Canonical method order for eval and report: the baselines, alpha sweeps,
/// then anisoalign; anything else follows alphabetically.
std::vector<std::string> canonical_order(std::vector<std::string> methods);

}  // namespace aniso::cli
