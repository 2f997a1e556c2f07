#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tyc/calibrate.hpp"
#include "tyc/control.hpp"
#include "tyc/models.hpp"

namespace tyc {

enum class InitMode {
  Equilibrium,  ///< stable interior equilibrium (f+*, m+*, 0) of the uncontrolled system
  Explicit,
};

/// Everything one run needs. Built from an INI-style file, JSON, or
/// individual `section.key` assignments; see README for the schema.
struct ScenarioConfig {
  LifeParams params;
  ModelSpec model;
  double t0 = 0.0;
  double t_end = 200.0;
  double dt = 0.05;
  InitMode init_mode = InitMode::Equilibrium;
  State init;
  SweepConfig sweep;
  double epsilon = 0.5;
  bool permanence = false;
  std::vector<ModelId> compare_models{kAllModels.begin(), kAllModels.end()};
  std::string out_dir = ".";
  std::uint64_t seed = 1;

  /// `key` is "section.key", e.g. "params.beta" or "model.id". Throws
  /// ValidationError for unknown keys and malformed values.
  void set(std::string_view key, std::string_view value);
  /// Checks every component invariant. Throws ValidationError.
  void validate() const;
  TimeGrid grid() const;
  /// Resolves the equilibrium start; throws ValidationError when the
  /// uncontrolled system has no interior equilibrium.
  State initial_state() const;
};

/// INI text: `[section]` headers, `key = value`, '#' or ';' comments.
ScenarioConfig parse_ini_config(std::string_view text);
/// JSON object of sections, each an object of keys.
ScenarioConfig parse_json_config(std::string_view text);
/// Picks JSON when the first non-blank character is '{'.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// "tyc0,fhms1", "1-6", "0,2,5", "all".
std::vector<ModelId> parse_model_list(std::string_view text);

/// Products of one workflow. `status` follows the CLI exit codes
/// (0 ok, 3 numerical failure such as non-convergence).
struct RunOutput {
  std::string json;
  std::string csv;
  std::string text;
  std::string svg;
  std::string stem;  ///< suggested file stem, e.g. "optimize_fhms1"
  bool converged = true;
  int status = 0;
};

RunOutput run_analyze(const ScenarioConfig& config);
/// Throws BlowUpError (with the last valid time) on divergence.
RunOutput run_simulate(const ScenarioConfig& config);
RunOutput run_optimize(const ScenarioConfig& config);
RunOutput run_compare(const ScenarioConfig& config, const std::vector<ModelId>& models);
/// Uses config.params as the starting guess.
RunOutput run_fit(const ObservationSeries& data, const ScenarioConfig& config);

}  // namespace tyc
