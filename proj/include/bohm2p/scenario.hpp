#pragma once

// Declarative scenario runs: a JSON document names a model, how to seed the
// initial configurations, the time grid and the checks to evaluate. The
// runner samples, propagates, computes statistics and writes
//
//   trajectories.csv  pair_id,t,x1,y1,x2,y2,status
//   marginals.csv     bin_low,bin_high,count,quantum_density,coordinate,t
//   report.json       scenario echo, diagnostics, per-check results
//   timings.json      wall-clock seconds per stage
//
// Everything except timings.json is byte-identical for a fixed config and
// seed, whatever the worker count.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bohm2p/dynamics.hpp"
#include "bohm2p/ensemble.hpp"
#include "bohm2p/statistics.hpp"
#include "bohm2p/checks.hpp"
#include "bohm2p/wavefunction.hpp"

namespace bohm2p {

inline constexpr std::string_view kScenarioSchema = "bohm2p/scenario/1";

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t n_samples_along_t = 2;  // evenly spaced, ends included
  std::vector<double> extra_times;    // merged into the grid

  std::vector<double> values() const;
};

struct InitialConditions {
  enum class Mode { Sample, Points, Grid };
  Mode mode = Mode::Sample;
  std::vector<ConfigPoint> points;  // Points and Grid modes, expanded at parse time
};

struct NamedRegionPair {
  std::string name;
  Region r1;
  Region r2;
};

struct HistogramSpec {
  std::vector<MarginalCoordinate> coordinates;
  std::vector<double> times;
  std::size_t bins = 50;
};

/// One configured pass/fail check; `params` keeps the kind-specific fields.
struct CheckSpec {
  std::string name;
  std::string kind;
  nlohmann::json params;
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  nlohmann::json model_json;  // echoed in the report
  WaveModel model{GaussianSlit{}};
  SamplerSettings sampler;
  IntegratorSettings integrator;
  TimeGrid time_grid;
  InitialConditions initial;
  std::vector<NamedRegionPair> regions;
  std::optional<HistogramSpec> histograms;
  std::vector<CheckSpec> checks;
  std::vector<std::string> property_checks;  // suites for `bohm2p check`
  bool property_checks_given = false;
  std::filesystem::path output_dir = "bohm2p-out";
  std::vector<std::string> output_formats = {"csv", "json"};
  unsigned threads = 0;

  nlohmann::json source;  // the document as read
};

/// Throws ConfigError naming the JSON field at fault.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig parse_scenario_text(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

struct BuiltinScenario {
  std::string_view name;
  std::string_view summary;
  std::string_view json;
};

const std::vector<BuiltinScenario>& builtin_scenarios();
/// Null when no built-in has that name.
const BuiltinScenario* find_builtin(std::string_view name);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool write_files = true;
};

struct RunResult {
  nlohmann::json report;
  nlohmann::json timings;
  bool all_passed = true;
  std::filesystem::path output_dir;
};

/// sample -> propagate -> statistics -> checks, then writes the output files.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Sampler stage only; writes samples.csv (pair_id,x1,y1,x2,y2) when
/// options.write_files.
RunResult run_sampler(const ScenarioConfig& config, const RunOptions& options = {});

/// Property suites listed in the config (all suites when the config does not
/// list any); the report has one entry per suite and model.
RunResult run_checks(const CheckOptions& options);

}  // namespace bohm2p
