#pragma once

// Command-line front end: config files, output writers and the four
// subcommands (run, sweep-c, oracle-check, gen-data).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "streampca/error.hpp"
#include "streampca/harness.hpp"

namespace streampca::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable capping replicate parallelism.
inline constexpr const char* kThreadsEnv = "STREAM_EIG_THREADS";

/// Parses the flat JSON config. Unknown keys, wrong types and invalid
/// values are rejected with InvalidConfig (or the validator's error).
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Inverse of config_from_json; the result loads back to an equal config.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// "%.17g", round-trip exact for doubles.
std::string format_double(double value);

void write_curves_csv(const std::filesystem::path& path, const ExperimentConfig& config,
                      const ExperimentResult& result);
nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result);

/// Reads kThreadsEnv: 0 when unset; throws InvalidConfig when malformed.
int threads_from_env();

/// Maps an error kind to the exit-code convention.
int exit_code_for(Errc code) noexcept;

/// Entry point used by the executable; output goes to the given streams.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace streampca::cli
