#include "qbattery/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qbattery/error.hpp"
#include "qbattery/tlm.hpp"

namespace qbattery {

std::string to_string(SweptParameter p) {
  switch (p) {
    case SweptParameter::OmegaC: return "omega_C";
    case SweptParameter::GBC: return "g_BC";
    case SweptParameter::ChargerWork: return "W_C";
    case SweptParameter::GB: return "g_B";
  }
  return "?";
}

SweptParameter parse_swept(const std::string& name) {
  if (name == "omega_C") return SweptParameter::OmegaC;
  if (name == "g_BC") return SweptParameter::GBC;
  if (name == "W_C" || name == "n") return SweptParameter::ChargerWork;
  if (name == "g_B") return SweptParameter::GB;
  throw ConfigError("unknown swept parameter '" + name + "'");
}

void ScanConfig::validate() const {
  system.validate();
  if (grid.empty()) throw ConfigError("scan grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ConfigError("scan grid must be strictly ascending");
  if (swept == SweptParameter::OmegaC && grid.front() <= 0.0)
    throw ConfigError("omega_C grid must be positive");
  if (swept == SweptParameter::ChargerWork)
    for (double v : grid)
      if (v != std::round(v) || static_cast<int>(v) % 2 == 0 || v < 1)
        throw ConfigError("W_C scans take odd excitation numbers n");
  if (n < 1) throw ConfigError("target excitation n must be >= 1");
  for (int nb : battery_sizes)
    if (nb < 1) throw ConfigError("battery sizes must be >= 1");
  if (!(window_half_width > 0.0) || !(seed_span > 0.0) || !(coarse_step > 0.0) ||
      !(fine_tolerance > 0.0))
    throw ConfigError("fine-tuning widths and tolerances must be positive");
}

std::vector<int> ScanConfig::sizes() const {
  return battery_sizes.empty() ? std::vector<int>{system.num_battery} : battery_sizes;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 1) throw ConfigError("grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return g;
}

SpectrumRow spectrum_point(const SystemConfig& config, const TmaxOptions& tmax, Execution exec) {
  SpectrumRow row;
  row.omega_C = config.omega_C;
  const double wc = config.charger_work();
  try {
    const ChargingSystem system(config, exec);
    const ChargingSummary s = find_t_max(system, tmax, exec);
    row.ratio_W = s.W_max / wc;
    row.ratio_E = s.ergotropy_at_t_max / wc;
    row.t_max = s.t_max;
  } catch (const NoTransferError& e) {
    row.ratio_W = e.max_work() / wc;
    row.status = "no-transfer";
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

namespace {

// Runs f(i) for i < count, in parallel when requested; each f handles its
// own failures, so the loop itself never throws.
template <class F>
void for_each_point(std::size_t count, Execution exec, F&& f) {
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) f(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < count; ++i) f(i);
  }
}

// Inner work runs serially when the scan itself is parallel.
Execution inner(Execution exec) { return exec == Execution::Parallel ? Execution::Serial : exec; }

}  // namespace

std::vector<SpectrumRow> spectrum_scan(const ScanConfig& config, Execution exec) {
  config.validate();
  if (config.swept != SweptParameter::OmegaC)
    throw ConfigError("spectrum scans sweep omega_C");
  std::vector<SpectrumRow> rows(config.grid.size());
  for_each_point(rows.size(), exec, [&](std::size_t i) {
    SystemConfig c = config.system;
    c.omega_C = config.grid[i];
    rows[i] = spectrum_point(c, config.tmax, inner(exec));
  });
  return rows;
}

std::vector<ResonancePeak> find_peaks(const std::vector<SpectrumRow>& rows, double threshold) {
  std::vector<ResonancePeak> peaks;
  bool inside = false;
  for (const auto& r : rows) {
    if (r.ratio_W > threshold && r.status == "ok") {
      if (!inside) peaks.push_back({});
      inside = true;
      auto& p = peaks.back();
      if (r.ratio_W > p.ratio) {
        p = {r.omega_C, r.ratio_W, r.t_max, r.ratio_W * r.omega_C / r.t_max, true};
      }
    } else {
      inside = false;
    }
  }
  return peaks;
}

std::vector<double> degeneracy_seeds(const SystemConfig& config, double lo, double hi) {
  const BatteryHamiltonian b =
      assemble_battery_only(config.num_battery, config.modes_battery, config.g_B, config.omega_B);
  RealVector parity(static_cast<Eigen::Index>(b.dim()));
  for (std::size_t s = 0; s < b.dim(); ++s) parity(static_cast<Eigen::Index>(s)) = b.states[s].parity();
  auto parity_of = [&](Eigen::Index k) {
    return b.eigenvectors.col(k).cwiseAbs2().dot(parity) > 0.0 ? 1 : -1;
  };
  // Dropping one charger level flips the charger parity, so only battery
  // states of opposite parity can absorb the quantum.
  const bool flip = config.charger_level % 2 == 1;
  const int p0 = parity_of(0);
  std::vector<double> seeds;
  for (Eigen::Index k = 1; k < b.eigenvalues.size(); ++k) {
    const double e = b.eigenvalues(k) - b.ground_energy();
    if (e <= lo || e >= hi) continue;
    if (flip && parity_of(k) == p0) continue;
    seeds.push_back(e);
  }
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

ResonancePeak fine_tune_resonance(int n_window, const ScanConfig& config, Execution exec) {
  config.validate();
  const double lo = (n_window - config.window_half_width) * config.system.omega_B;
  const double hi = (n_window + config.window_half_width) * config.system.omega_B;
  const double step = config.coarse_step;

  std::vector<double> candidates;
  const auto seeds = degeneracy_seeds(config.system, lo, hi);
  if (seeds.empty()) {
    candidates = linear_grid(std::max(lo, step), hi, static_cast<int>(std::ceil((hi - lo) / step)) + 1);
  } else {
    const int half = static_cast<int>(std::ceil(config.seed_span / step));
    for (double s : seeds)
      for (int k = -half; k <= half; ++k) {
        const double w = s + k * step;
        if (w > lo && w < hi && w > 0.0) candidates.push_back(w);
      }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [&](double a, double b) { return b - a < 0.25 * step; }),
                     candidates.end());
  }

  std::vector<SpectrumRow> rows(candidates.size());
  for_each_point(rows.size(), exec, [&](std::size_t i) {
    SystemConfig c = config.system;
    c.omega_C = candidates[i];
    rows[i] = spectrum_point(c, config.tmax, inner(exec));
  });

  ResonancePeak best;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].status == "ok" && rows[i].ratio_W > best.ratio) {
      best = {rows[i].omega_C, rows[i].ratio_W, rows[i].t_max, 0.0, true};
      arg = i;
    }
  if (!best.found) return best;

  auto ratio = [&](double w) {
    SystemConfig c = config.system;
    c.omega_C = w;
    return spectrum_point(c, config.tmax, exec);
  };
  const double a = std::max(lo, arg > 0 ? candidates[arg - 1] : candidates[arg] - step);
  const double b = std::min(hi, arg + 1 < candidates.size() ? candidates[arg + 1] : candidates[arg] + step);
  const double w = golden_section_maximize([&](double x) { return ratio(x).ratio_W; }, a, b,
                                           config.fine_tolerance);
  const SpectrumRow refined = ratio(w);
  if (refined.status == "ok" && refined.ratio_W >= best.ratio)
    best = {refined.omega_C, refined.ratio_W, refined.t_max, 0.0, true};
  best.power = best.ratio * config.system.charger_level * best.omega_C / best.t_max;
  best.found = best.ratio >= config.min_peak_ratio;
  return best;
}

namespace {

PowerRow resonant_row(const ScanConfig& config, double value, int num_battery, Execution exec) {
  PowerRow row;
  row.swept_value = value;
  row.num_battery = num_battery;
  SystemConfig c = config.system;
  c.num_battery = num_battery;
  int n = config.n;
  switch (config.swept) {
    case SweptParameter::GBC: c.g_BC = value; break;
    case SweptParameter::GB: c.g_B = value; break;
    case SweptParameter::ChargerWork: n = static_cast<int>(value); break;
    case SweptParameter::OmegaC: c.omega_C = value; break;
  }
  row.g_B = c.g_B;
  row.g_BC = c.g_BC;
  row.n = n;
  try {
    // Charger level fixed at 1: the TLM quantities refer to W_C(0) = omega_C.
    const double tlm_root = resonance_solve(n, num_battery, c.g_BC);
    if (config.swept != SweptParameter::OmegaC) {
      if (c.g_B == 0.0) {
        c.omega_C = tlm_root;
      } else {
        ScanConfig sub = config;
        sub.system = c;
        const ResonancePeak peak = fine_tune_resonance(n, sub, exec);
        if (!peak.found) throw NoTransferError("no resonance in window", peak.ratio);
        c.omega_C = peak.omega_C;
      }
    }
    row.omega_C = c.omega_C;
    const TwoLevelParams p = tlm_params(n, num_battery, c.g_BC, c.omega_B, tlm_root);
    row.power_TLM = power_tlm(p);
    row.tau_tlm = qsl_tlm(p);

    const ChargingSystem system(c, exec);
    const ChargingSummary s = find_t_max(system, config.tmax, exec);
    row.t_max = s.t_max;
    row.W_max = s.W_max;
    row.W_C = c.charger_work();
    row.W_irr = s.W_irr_at_t_max;
    row.power_ED = s.power;
    row.tau_num = qsl_secular(system, 0.5 * std::min(c.omega_B, c.omega_C));
    row.tau_full = qsl_numeric(system.initial(), system.hamiltonians().H1);
  } catch (const NoTransferError&) {
    row.status = "no-transfer";
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

}  // namespace

std::vector<PowerRow> power_scan(const ScanConfig& config, Execution exec) {
  config.validate();
  const auto sizes = config.sizes();
  const std::size_t count = config.grid.size() * sizes.size();
  std::vector<PowerRow> rows(count);
  // Row order: grid-major, battery size minor.
  for_each_point(count, exec, [&](std::size_t i) {
    rows[i] = resonant_row(config, config.grid[i / sizes.size()], sizes[i % sizes.size()], inner(exec));
  });
  return rows;
}

std::vector<PowerRow> wirr_scan(const ScanConfig& config, Execution exec) { return power_scan(config, exec); }

double ConvergenceReport::relative_change() const {
  return std::abs(W_doubled - W_base) / std::abs(W_base);
}

ConvergenceReport convergence_check(const SystemConfig& config, const TmaxOptions& tmax, Execution exec) {
  ConvergenceReport r;
  r.base = config;
  SystemConfig doubled = config;
  doubled.modes_battery *= 2;
  doubled.modes_charger *= 2;
  r.modes_battery_doubled = doubled.modes_battery;
  r.modes_charger_doubled = doubled.modes_charger;
  {
    const ChargingSystem s(config, exec);
    const auto sum = find_t_max(s, tmax, exec);
    r.W_base = sum.W_max;
    r.t_base = sum.t_max;
  }
  const ChargingSystem s(doubled, exec);
  const auto sum = find_t_max(s, tmax, exec);
  r.W_doubled = sum.W_max;
  r.t_doubled = sum.t_max;
  return r;
}

namespace {

void precise(std::ostream& out) { out.precision(12); }

}  // namespace

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRow>& rows) {
  precise(out);
  out << "# qbattery-spectrum v1\n"
      << "omega_C,ratio_W,ratio_E,t_max,status\n";
  for (const auto& r : rows)
    out << r.omega_C << ',' << r.ratio_W << ',' << r.ratio_E << ',' << r.t_max << ',' << r.status << '\n';
}

void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows) {
  precise(out);
  out << "# qbattery-power v1\n"
      << "swept,N_B,g_B,g_BC,n,omega_C,t_max,W_max,power_ED,power_TLM,tau_num,tau_tlm,tau_full,status\n";
  for (const auto& r : rows)
    out << r.swept_value << ',' << r.num_battery << ',' << r.g_B << ',' << r.g_BC << ',' << r.n << ','
        << r.omega_C << ',' << r.t_max << ',' << r.W_max << ',' << r.power_ED << ',' << r.power_TLM << ','
        << r.tau_num << ',' << r.tau_tlm << ',' << r.tau_full << ',' << r.status << '\n';
}

void write_wirr_csv(std::ostream& out, const std::vector<PowerRow>& rows) {
  precise(out);
  out << "# qbattery-wirr v1\n"
      << "swept,N_B,g_B,g_BC,n,omega_C,t_max,W_max,W_C,W_irr,below_1pct,status\n";
  for (const auto& r : rows)
    out << r.swept_value << ',' << r.num_battery << ',' << r.g_B << ',' << r.g_BC << ',' << r.n << ','
        << r.omega_C << ',' << r.t_max << ',' << r.W_max << ',' << r.W_C << ',' << r.W_irr << ','
        << (r.wirr_below_one_percent() ? 1 : 0) << ',' << r.status << '\n';
}

}  // namespace qbattery
