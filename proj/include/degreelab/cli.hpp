#pragma once

// Configuration-driven front end: strict JSON configs, deterministic JSON
// reports and grid artifacts.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "degreelab/currents.hpp"
#include "degreelab/mapmodels.hpp"

namespace degreelab::cli {

using Json = nlohmann::json;

inline constexpr const char* kLibraryVersion = "0.1.0";

enum class Command { Degrees, Stability, Spectral, Green, Ergodic, Contraction, Report, Validate };

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command command);

/// Invalid configuration; `field` is a dotted path to the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct Tolerances {
  double spectral = 1e-9;
  double nef = 1e-9;
  double membership = 1e-8;
  double green = 1e-9;
  double cluster_radius = 1e-7;
  double zero = 1e-9;
  double residual = 1e-6;
};

struct RunConfig {
  ModelParams params;
  Json model;  // canonical model document
  std::optional<Command> command;
  Tolerances tolerances;
  std::uint64_t seed = 1;
  int horizon = 50;
  int n_max = 40;
  int degree_steps = 3;
  int tree_depth = 6;
  int nx = 65;
  int ny = 65;
  GridSlice slice;
  GreenWhich which = GreenWhich::Plus;
  int mc_samples = 1000;
  int residual_samples = 100;
  int lyapunov_steps = 10000;
  int lyapunov_samples = 4;
  int haar_n = 3;
};

/// Parses a config document against the strict schema.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Sorted keys, 17 significant digits, two-space indent; non-finite floats
/// become null.
std::string dump_json(const Json& value);

/// FNV-1a 64 of the canonical model document, as 16 hex digits.
std::string model_hash(const Json& model);

struct RunResult {
  int exit_code = 0;
  Json report;
  std::optional<GreenGrid> grid;
  Json grid_meta;
};

RunResult run(Command command, const RunConfig& config);
RunResult report_all(const RunConfig& config);
RunResult validate(const RunConfig& config);

/// Writes report.json (and grid.csv, grid.meta.json) atomically.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

/// Full command-line entry point; returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace degreelab::cli
