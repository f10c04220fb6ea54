#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qbattery/dynamics.hpp"
#include "qbattery/thermo.hpp"

namespace qbattery {

enum class SweptParameter { OmegaC, GBC, ChargerWork, GB };

std::string to_string(SweptParameter p);
SweptParameter parse_swept(const std::string& name);

/// One scan: a grid over the swept parameter with everything else fixed.
///
/// For power and W_irr scans each row is a resonant point. With
/// swept == ChargerWork the grid holds the odd excitation numbers n; for
/// the other parameters the target excitation is `n`.
struct ScanConfig {
  SweptParameter swept = SweptParameter::OmegaC;
  SystemConfig system;
  int n = 3;
  std::vector<double> grid;
  /// Battery sizes for power/W_irr scans; empty means system.num_battery.
  std::vector<int> battery_sizes;
  TmaxOptions tmax;
  /// Fine-tuning controls used for interacting batteries.
  double window_half_width = 0.5;
  double seed_span = 0.1;
  double coarse_step = 0.01;
  double fine_tolerance = 1e-5;
  double min_peak_ratio = 0.5;
  /// Repeat the first successful row with doubled cutoffs.
  bool convergence_check = false;

  void validate() const;
  std::vector<int> sizes() const;
};

/// Evenly spaced ascending grid with `points` values over [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int points);

struct SpectrumRow {
  double omega_C = 0.0;
  double ratio_W = 0.0;  ///< W_B(t_max) / W_C(0)
  double ratio_E = 0.0;  ///< ergotropy(t_max) / W_C(0)
  double t_max = 0.0;
  std::string status = "ok";  ///< "ok", "no-transfer" or the failure message
};

struct ResonancePeak {
  double omega_C = 0.0;
  double ratio = 0.0;
  double t_max = 0.0;
  double power = 0.0;
  bool found = false;
};

struct PowerRow {
  double swept_value = 0.0;
  int num_battery = 0;
  double g_B = 0.0;
  double g_BC = 0.0;
  int n = 0;
  double omega_C = 0.0;
  double t_max = 0.0;
  double W_max = 0.0;
  double W_C = 0.0;
  double W_irr = 0.0;
  double power_ED = 0.0;
  double power_TLM = 0.0;
  double tau_num = 0.0;   ///< secular Mandelstam-Tamm estimate
  double tau_tlm = 0.0;
  double tau_full = 0.0;  ///< Mandelstam-Tamm with the full H1 variance
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
  bool wirr_below_one_percent() const { return W_irr < 0.01 * W_C; }
};

struct ConvergenceReport {
  SystemConfig base;
  int modes_battery_doubled = 0;
  int modes_charger_doubled = 0;
  double W_base = 0.0;
  double W_doubled = 0.0;
  double t_base = 0.0;
  double t_doubled = 0.0;
  double relative_change() const;
};

/// Transfer ratio W_B(t_max) / W_C(0) for one configuration; a run without
/// transfer yields a zero row with status "no-transfer".
SpectrumRow spectrum_point(const SystemConfig& config, const TmaxOptions& tmax = {},
                           Execution exec = Execution::Parallel);

/// Sweeps omega_C over config.grid. Per-point failures are recorded in the
/// row status and the scan continues.
std::vector<SpectrumRow> spectrum_scan(const ScanConfig& config, Execution exec = Execution::Parallel);

/// Contiguous runs of rows with ratio_W above `threshold`, each reported at
/// its highest row. Peak powers assume charger level 1.
std::vector<ResonancePeak> find_peaks(const std::vector<SpectrumRow>& rows, double threshold);

/// Battery excitation energies E_k - E_0 inside (lo, hi), ascending.
std::vector<double> degeneracy_seeds(const SystemConfig& config, double lo, double hi);

/// Best transfer peak within n_window +- window_half_width. Seeds at the
/// battery excitation energies, scans a local grid, refines by golden
/// section. found == false when no point reaches min_peak_ratio.
ResonancePeak fine_tune_resonance(int n_window, const ScanConfig& config,
                                  Execution exec = Execution::Parallel);

/// Resonant power and irreversible work per (grid value, N_B).
std::vector<PowerRow> power_scan(const ScanConfig& config, Execution exec = Execution::Parallel);
/// Same rows as power_scan; kept separate because the figure wants W_irr.
std::vector<PowerRow> wirr_scan(const ScanConfig& config, Execution exec = Execution::Parallel);

ConvergenceReport convergence_check(const SystemConfig& config, const TmaxOptions& tmax = {},
                                    Execution exec = Execution::Parallel);

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRow>& rows);
void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows);
void write_wirr_csv(std::ostream& out, const std::vector<PowerRow>& rows);

}  // namespace qbattery
