#pragma once

#include <map>
#include <string>
#include <vector>

#include "qbattery/dynamics.hpp"
#include "qbattery/experiments.hpp"
#include "qbattery/thermo.hpp"

namespace qbattery {

enum class Subcommand { Simulate, Scan, Resonance, Tlm, Reproduce };

std::string to_string(Subcommand c);

/// Everything a run needs. Built from an INI file with sections [system],
/// [numerics], [scan] and [output]; the keys are listed in README.md.
struct RunConfig {
  Subcommand command = Subcommand::Simulate;
  SystemConfig system;
  /// Target excitation; when omega_C is not given it is the resonant root.
  int n = 0;
  bool omega_C_given = false;

  double horizon = 0.0;
  int time_points = 600;
  double coarse_dt = 0.25;
  double fine_dt = 0.02;
  double tolerance = 1e-6;

  std::string scan_kind = "spectrum";  ///< spectrum | power | wirr | resonance
  SweptParameter swept = SweptParameter::OmegaC;
  double grid_min = 0.5;
  double grid_max = 5.5;
  int grid_points = 101;
  std::vector<double> grid_values;  ///< explicit grid, overrides min/max/points
  std::vector<int> battery_sizes;
  bool convergence_check = false;

  std::string out_dir = ".";
  std::string figure;
  int threads = 0;

  /// Non-fatal findings from parsing (negative g_BC, small cutoffs, ...).
  std::vector<std::string> warnings;

  int target_excitation() const;
  TmaxOptions tmax() const;
  ScanConfig scan() const;
  std::vector<double> grid() const;
  /// Resolves omega_C from n when omega_C was not given explicitly.
  SystemConfig resolved_system() const;
};

/// Parses INI text, applies `overrides` ("section.key" -> value) on top and
/// validates. Unknown sections or keys and malformed values throw
/// ConfigError; warnings are collected in RunConfig::warnings.
RunConfig parse_config(const std::string& text,
                       const std::map<std::string, std::string>& overrides = {});
RunConfig load_config(const std::string& path,
                      const std::map<std::string, std::string>& overrides = {});

/// Canonical INI rendering; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& config);

/// Output root from QBATTERY_OUT, else ".".
std::string default_output_root();

}  // namespace qbattery
