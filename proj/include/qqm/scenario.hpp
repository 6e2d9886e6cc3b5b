#pragma once

// Scenario files: a strict key = value format with [sections], the runner that
// turns one into an evolution plus check suites, and the artifact writer.
//
//   name = ho_ground_right
//   equation = right            # right | left
//   [grid]      dims n length boundary
//   [units]     hbar mass
//   [potential] family + catalog parameters   (repeatable, summed)
//   [gauge]     family + catalog parameters   (repeatable, summed)
//   [state]     kind = gaussian | plane-wave | ho-eigenstate, x0 k0 sigma k n omega q0
//   [evolve]    dt t_final record_every
//   [checks]    suites, virial_stationarity, continuity_margin
//   [output]    directory formats

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qqm/dynamics.hpp"

namespace qqm {

struct GridConfig {
  int dims = 1;
  int n = 256;
  double length = 12.0;
  Boundary boundary = Boundary::periodic;
};

struct StateConfig {
  std::string kind = "gaussian";
  std::array<double, 3> x0{};
  std::array<double, 3> k0{};
  double sigma = 1.0;
  std::array<double, 3> k{};  // plane-wave
  int n = 0;                  // ho-eigenstate quantum number
  double omega = 1.0;         // ho-eigenstate frequency
  Quaternion q0{1.0, 0.0, 0.0, 0.0};
};

struct EvolveConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  int record_every = 10;
};

struct ChecksConfig {
  std::vector<std::string> suites;
  Stationarity virial_stationarity = Stationarity::require;
  /// Physical distance from the faces excluded from nodewise residuals;
  /// negative selects a tenth of the box.
  double continuity_margin = -1.0;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};
};

struct ScenarioConfig {
  std::string name = "scenario";
  Equation equation = Equation::right;
  GridConfig grid;
  Units units;
  std::vector<PotentialSpec> potentials;
  std::vector<PotentialSpec> gauges;
  StateConfig state;
  EvolveConfig evolve;
  ChecksConfig checks;
  OutputConfig output;
  int resolution_scale = 1;
};

/// Check suites a config may request.
const std::vector<std::string>& known_suites();

struct ParseResult {
  std::optional<ScenarioConfig> config;  // empty when errors is not
  std::vector<std::string> errors;       // every problem found, with line numbers
  std::vector<std::string> warnings;
};

ParseResult parse_config(std::string_view text);

/// Reads and parses a file; throws ConfigError listing every error. Warnings
/// go to the diagnostics sink.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical text of a config; parses back to the same config.
std::string format_config(const ScenarioConfig& config);

/// Multiplies n and divides dt by `factor`.
ScenarioConfig scaled(const ScenarioConfig& config, int factor);

struct ScenarioResult {
  ObservationSeries series;
  std::string csv;
  nlohmann::ordered_json report;
  nlohmann::ordered_json meta;
  std::string field_table;  // last recorded state, only with the "fields" format
};

/// Runs the evolution and every requested suite. Throws DivergenceError when
/// the solver blows up.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Writes series.csv, report.json, meta.json and field_final.csv (as selected by formats) into
/// `dir`, creating it. Filesystem errors propagate unchanged.
void write_outputs(const ScenarioResult& result, const ScenarioConfig& config,
                   const std::filesystem::path& dir);

/// "%.17g".
std::string format_double(double v);

}  // namespace qqm
