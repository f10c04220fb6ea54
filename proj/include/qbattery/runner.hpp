#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qbattery/config.hpp"

namespace qbattery {

/// Files written by one run plus the manifest that was saved next to them.
struct RunOutputs {
  std::string directory;
  std::vector<std::string> files;
  nlohmann::json manifest;
};

/// Time series, battery populations and t_max summary for one system.
RunOutputs run_simulate(const RunConfig& config, Execution exec = Execution::Parallel);
/// Spectrum, power, W_irr or resonance scan selected by config.scan_kind.
RunOutputs run_scan(const RunConfig& config, Execution exec = Execution::Parallel);
/// Fine-tuned peak in the window of the target excitation.
RunOutputs run_resonance(const RunConfig& config, Execution exec = Execution::Parallel);
/// Two-level-model table over config.battery_sizes (omega_C*, tau, power).
RunOutputs run_tlm(const RunConfig& config);

struct ReproduceOptions {
  std::string out_dir = ".";
  int modes_battery = 12;
  int modes_charger = 12;
  /// Overrides the preset battery sizes when non-empty.
  std::vector<int> battery_sizes;
};

std::vector<std::string> figure_ids();
/// Runs a figure preset into out_dir/<figure_id>. Unknown ids throw ConfigError.
RunOutputs reproduce(const std::string& figure_id, const ReproduceOptions& options,
                     Execution exec = Execution::Parallel);

}  // namespace qbattery
