#include "qbattery/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qbattery/error.hpp"
#include "qbattery/integrals.hpp"
#include "qbattery/parallel.hpp"
#include "qbattery/tlm.hpp"

namespace qbattery {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kPopulationColumns = 6;

// A run directory collects CSVs, one plot script and the manifest.
class Artifacts {
 public:
  explicit Artifacts(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    files_.push_back(name);
    std::ofstream f(fs::path(dir_) / name);
    if (!f) throw ConfigError("cannot write '" + (fs::path(dir_) / name).string() + "'");
    return f;
  }

  struct Curve {
    std::string file, x, y, label;
  };

  void plot(const std::string& title, const std::vector<Curve>& curves) { panels_.push_back({title, curves}); }

  RunOutputs finish(json manifest) {
    if (!panels_.empty()) write_plot_script();
    manifest["outputs"] = files_;
    files_.push_back("manifest.json");
    std::ofstream(fs::path(dir_) / "manifest.json") << manifest.dump(2) << '\n';
    return {dir_, files_, std::move(manifest)};
  }

 private:
  void write_plot_script() {
    auto f = open("plot.py");
    f << "#!/usr/bin/env python3\n"
         "# Plots the CSVs in this directory; needs matplotlib.\n"
         "import csv, os, sys\n"
         "import matplotlib\n"
         "matplotlib.use('Agg')\n"
         "import matplotlib.pyplot as plt\n\n"
         "HERE = os.path.dirname(os.path.abspath(__file__))\n\n"
         "def load(name):\n"
         "    with open(os.path.join(HERE, name)) as fh:\n"
         "        rows = list(csv.DictReader(l for l in fh if not l.startswith('#')))\n"
         "    return rows\n\n"
         "def column(rows, key):\n"
         "    return [float(r[key]) for r in rows if r.get('status', 'ok') in ('ok', 'no-transfer')]\n\n"
         "PANELS = [\n";
    for (const auto& [title, curves] : panels_) {
      f << "    (" << json(title).dump() << ", [\n";
      for (const auto& c : curves)
        f << "        (" << json(c.file).dump() << ", " << json(c.x).dump() << ", " << json(c.y).dump() << ", "
          << json(c.label).dump() << "),\n";
      f << "    ]),\n";
    }
    f << "]\n\n"
         "fig, axes = plt.subplots(len(PANELS), 1, figsize=(6, 3.2 * len(PANELS)), squeeze=False)\n"
         "for ax, (title, curves) in zip(axes[:, 0], PANELS):\n"
         "    for name, x, y, label in curves:\n"
         "        rows = load(name)\n"
         "        ax.plot(column(rows, x), column(rows, y), label=label)\n"
         "    ax.set_title(title)\n"
         "    ax.set_xlabel(curves[0][1])\n"
         "    ax.legend(fontsize='small')\n"
         "fig.tight_layout()\n"
         "fig.savefig(os.path.join(HERE, sys.argv[1] if len(sys.argv) > 1 else 'figure.png'), dpi=150)\n";
  }

  std::string dir_;
  std::vector<std::string> files_;
  std::vector<std::pair<std::string, std::vector<Curve>>> panels_;
};

json system_json(const SystemConfig& s) {
  return {{"num_battery", s.num_battery}, {"modes_battery", s.modes_battery},
          {"modes_charger", s.modes_charger}, {"omega_B", s.omega_B},
          {"omega_C", s.omega_C},           {"g_B", s.g_B},
          {"g_BC", s.g_BC},                 {"charger_level", s.charger_level},
          {"sector", to_string(s.sector)}};
}

json base_manifest(const std::string& command, const RunConfig& config) {
  return {{"tool", "qbattery"},
          {"manifest_version", 1},
          {"command", command},
          {"config_ini", to_ini(config)},
          {"warnings", config.warnings}};
}

json summary_json(const ChargingSummary& s) {
  return {{"t_max", s.t_max}, {"W_max", s.W_max}, {"ergotropy", s.ergotropy_at_t_max}, {"power", s.power},
          {"W_irr", s.W_irr_at_t_max}, {"S_B", s.S_B_at_t_max}, {"horizon", s.horizon}};
}

std::vector<double> time_grid(const ChargingSystem& system, const RunConfig& config) {
  if (config.horizon <= 0.0) return default_time_grid(system, config.time_points);
  std::vector<double> t(static_cast<std::size_t>(config.time_points));
  for (int i = 0; i < config.time_points; ++i)
    t[static_cast<std::size_t>(i)] = config.horizon * i / (config.time_points - 1);
  return t;
}

void write_populations(std::ostream& out, const ChargingSystem& system, const std::vector<double>& times,
                       Execution exec) {
  const int k = std::min<int>(kPopulationColumns, static_cast<int>(system.battery().dim()));
  std::vector<BatteryDensityMatrix> rho(times.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4) if (exec == Execution::Parallel)
  for (std::size_t i = 0; i < times.size(); ++i) {
    try {
      rho[i] = partial_trace_charger(system.state_at(times[i]), system.basis(), system.battery());
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  out.precision(12);
  out << "# qbattery-populations v1\nt";
  for (int j = 0; j < k; ++j) out << ",lambda_" << j;
  for (int j = 0; j < k; ++j) out << ",p_" << j;
  out << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << times[i];
    for (int j = 0; j < k; ++j) out << ',' << rho[i].eigenvalues(j);
    for (int j = 0; j < k; ++j) out << ',' << rho[i].projections(j);
    out << '\n';
  }
}

// Series, populations and the two-level overlay for one system; returns
// the manifest entry.
json simulate_into(Artifacts& art, const std::string& tag, const SystemConfig& sys, const RunConfig& config,
                   Execution exec) {
  const ChargingSystem system(sys, exec);
  const auto times = time_grid(system, config);
  const ObservableSeries series = time_series(system, times, exec);
  {
    auto f = art.open("series" + tag + ".csv");
    write_series_csv(f, series);
  }
  {
    auto f = art.open("populations" + tag + ".csv");
    write_populations(f, system, times, exec);
  }
  json entry = {{"system", system_json(sys)},
                {"basis_dim", system.basis().size()},
                {"dropped_weight", system.propagator().dropped_weight()}};
  const int n = config.target_excitation();
  if (n % 2 == 1 && sys.g_B == 0.0 && sys.charger_level == 1) {
    const TwoLevelParams p = tlm_params(n, sys.num_battery, sys.g_BC, sys.omega_B, sys.omega_C);
    auto f = art.open("tlm" + tag + ".csv");
    f.precision(12);
    f << "# qbattery-tlm-series v1\nt,W_tlm,ergotropy_tlm\n";
    for (double t : times) f << t << ',' << wb_tlm(p, t) << ',' << ergotropy_tlm(p, t) << '\n';
    entry["tlm"] = {{"n", n}, {"delta", p.delta}, {"J", p.J}, {"tau_qsl", qsl_tlm(p)}};
  }
  try {
    const ChargingSummary s = find_t_max(system, config.tmax(), exec);
    entry["summary"] = summary_json(s);
  } catch (const NoTransferError& e) {
    entry["summary"] = {{"status", "no-transfer"}, {"max_work", e.max_work()}};
  }
  entry["tau_secular"] = qsl_secular(system, 0.5 * std::min(sys.omega_B, sys.omega_C));
  entry["tau_full_variance"] = qsl_numeric(system.initial(), system.hamiltonians().H1);
  return entry;
}

std::string out_dir(const RunConfig& config) { return config.out_dir.empty() ? "." : config.out_dir; }

json scan_into(Artifacts& art, const std::string& tag, const ScanConfig& sc, const std::string& kind,
               Execution exec) {
  json entry = {{"kind", kind},
                {"swept", to_string(sc.swept)},
                {"grid", sc.grid},
                {"n", sc.n},
                {"battery_sizes", sc.sizes()},
                {"system", system_json(sc.system)}};
  if (kind == "spectrum") {
    const auto rows = spectrum_scan(sc, exec);
    auto f = art.open("spectrum" + tag + ".csv");
    write_spectrum_csv(f, rows);
    json peaks = json::array();
    for (const auto& p : find_peaks(rows, sc.min_peak_ratio))
      peaks.push_back({{"omega_C", p.omega_C}, {"ratio", p.ratio}, {"t_max", p.t_max}});
    entry["peaks"] = peaks;
  } else if (kind == "power" || kind == "wirr") {
    const auto rows = power_scan(sc, exec);
    auto f = art.open(kind + tag + ".csv");
    if (kind == "power") write_power_csv(f, rows);
    else write_wirr_csv(f, rows);
    int failed = 0;
    for (const auto& r : rows) failed += r.ok() ? 0 : 1;
    entry["failed_rows"] = failed;
  } else {
    throw ConfigError("unknown scan kind '" + kind + "'");
  }
  if (sc.convergence_check) {
    SystemConfig probe = sc.system;
    probe.num_battery = sc.sizes().front();
    if (sc.swept != SweptParameter::OmegaC && sc.system.g_B == 0.0)
      probe.omega_C = resonance_solve(sc.n, probe.num_battery, probe.g_BC);
    try {
      const auto r = convergence_check(probe, sc.tmax, exec);
      entry["convergence"] = {{"modes", {probe.modes_battery, r.modes_battery_doubled}},
                              {"W", {r.W_base, r.W_doubled}},
                              {"t_max", {r.t_base, r.t_doubled}},
                              {"relative_change", r.relative_change()}};
    } catch (const std::exception& e) {
      entry["convergence"] = {{"status", std::string("error: ") + e.what()}};
    }
  }
  return entry;
}

}  // namespace

RunOutputs run_simulate(const RunConfig& config, Execution exec) {
  Artifacts art(out_dir(config));
  const SystemConfig sys = config.resolved_system();
  json m = base_manifest("simulate", config);
  m["runs"] = {simulate_into(art, "", sys, config, exec)};
  art.plot("stored work", {{"series.csv", "t", "W_B", "W_B"}, {"series.csv", "t", "ergotropy", "ergotropy"}});
  art.plot("entropy", {{"series.csv", "t", "S_B", "S_B"}});
  return art.finish(m);
}

RunOutputs run_scan(const RunConfig& config, Execution exec) {
  if (config.scan_kind == "resonance") return run_resonance(config, exec);
  Artifacts art(out_dir(config));
  json m = base_manifest("scan", config);
  m["scans"] = {scan_into(art, "", config.scan(), config.scan_kind, exec)};
  if (config.scan_kind == "spectrum")
    art.plot("transfer ratio", {{"spectrum.csv", "omega_C", "ratio_W", "W_B/W_C"},
                                {"spectrum.csv", "omega_C", "ratio_E", "E_B/W_C"}});
  else if (config.scan_kind == "power")
    art.plot("power", {{"power.csv", "swept", "power_ED", "ED"}, {"power.csv", "swept", "power_TLM", "TLM"}});
  else
    art.plot("irreversible work", {{"wirr.csv", "swept", "W_irr", "W_irr"}});
  return art.finish(m);
}

RunOutputs run_resonance(const RunConfig& config, Execution exec) {
  Artifacts art(out_dir(config));
  json m = base_manifest("resonance", config);
  ScanConfig sc = config.scan();
  const int n = config.target_excitation();
  auto f = art.open("resonance.csv");
  f.precision(12);
  f << "# qbattery-resonance v1\nN_B,g_B,g_BC,n,omega_C_tlm,omega_C_peak,ratio,t_max,power,found\n";
  for (int nb : sc.sizes()) {
    sc.system.num_battery = nb;
    const ResonancePeak p = fine_tune_resonance(n, sc, exec);
    double root = std::nan("");
    if (n % 2 == 1) root = resonance_solve(n, nb, sc.system.g_BC);
    f << nb << ',' << sc.system.g_B << ',' << sc.system.g_BC << ',' << n << ',' << root << ',' << p.omega_C << ','
      << p.ratio << ',' << p.t_max << ',' << p.power << ',' << (p.found ? 1 : 0) << '\n';
  }
  return art.finish(m);
}

RunOutputs run_tlm(const RunConfig& config) {
  Artifacts art(out_dir(config));
  json m = base_manifest("tlm", config);
  const int n = config.target_excitation();
  const std::vector<int> sizes =
      config.battery_sizes.empty() ? std::vector<int>{config.system.num_battery} : config.battery_sizes;
  auto f = art.open("tlm.csv");
  f.precision(12);
  f << "# qbattery-tlm v1\nn,N_B,g_BC,omega_C_star,delta_at_n,J,tau_qsl,power,tau_fermionic\n";
  for (int nb : sizes) {
    const double root = resonance_solve(n, nb, config.system.g_BC);
    const TwoLevelParams p = tlm_params(n, nb, config.system.g_BC, config.system.omega_B, root);
    const TwoLevelParams bare = tlm_params(n, nb, config.system.g_BC, config.system.omega_B, n);
    f << n << ',' << nb << ',' << config.system.g_BC << ',' << root << ',' << bare.delta << ',' << p.J << ','
      << qsl_tlm(p) << ',' << power_tlm(p) << ','
      << qsl_fermionic(nb, n, config.system.g_BC, config.system.omega_B, root) << '\n';
  }
  return art.finish(m);
}

std::vector<std::string> figure_ids() {
  return {"fig2a", "fig2b", "fig2g", "fig3a", "fig3b", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "overlaps"};
}

namespace {

RunConfig preset_base(const ReproduceOptions& o, const std::string& id) {
  RunConfig c;
  c.command = Subcommand::Reproduce;
  c.figure = id;
  c.out_dir = (fs::path(o.out_dir) / id).string();
  c.system.modes_battery = o.modes_battery;
  c.system.modes_charger = o.modes_charger;
  c.system.g_BC = 0.1;
  return c;
}

std::vector<int> sizes_or(const ReproduceOptions& o, std::vector<int> preset) {
  return o.battery_sizes.empty() ? preset : o.battery_sizes;
}

std::string nb_tag(int nb) { return "_N" + std::to_string(nb); }

std::string g_tag(double g) {
  std::ostringstream s;
  s << "_gB" << g;
  return s.str();
}

json preset_manifest(const RunConfig& c, const ReproduceOptions& o) {
  json m = base_manifest("reproduce", c);
  m["figure"] = c.figure;
  m["cutoffs"] = {{"modes_battery", o.modes_battery}, {"modes_charger", o.modes_charger}};
  m["rerun"] = "qbattery reproduce " + c.figure + " --modes-battery " + std::to_string(o.modes_battery) +
               " --modes-charger " + std::to_string(o.modes_charger);
  return m;
}

RunOutputs time_series_figure(RunConfig c, const ReproduceOptions& o, const std::vector<int>& sizes,
                              bool resonant, Execution exec) {
  Artifacts art(c.out_dir);
  json m = preset_manifest(c, o);
  json runs = json::array();
  std::vector<Artifacts::Curve> work, entropy, eint, wirr;
  for (int nb : sizes) {
    SystemConfig s = c.system;
    s.num_battery = nb;
    if (resonant) s.omega_C = resonance_solve(c.n, nb, s.g_BC);
    const std::string tag = sizes.size() > 1 ? nb_tag(nb) : "";
    runs.push_back(simulate_into(art, tag, s, c, exec));
    const std::string file = "series" + tag + ".csv";
    const std::string label = "N_B=" + std::to_string(nb);
    work.push_back({file, "t", "W_B", "W_B " + label});
    work.push_back({file, "t", "ergotropy", "ergotropy " + label});
    entropy.push_back({file, "t", "S_B", label});
    eint.push_back({file, "t", "E_int", label});
    wirr.push_back({file, "t", "W_irr", label});
  }
  m["runs"] = runs;
  art.plot("stored work and ergotropy", work);
  art.plot("battery entropy", entropy);
  art.plot("interaction energy", eint);
  art.plot("irreversible work", wirr);
  return art.finish(m);
}

}  // namespace

RunOutputs reproduce(const std::string& id, const ReproduceOptions& o, Execution exec) {
  const auto ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw ConfigError("unknown figure id '" + id + "'");
  RunConfig c = preset_base(o, id);
  if (id == "fig2a") {
    c.system.num_battery = 2;
    c.system.omega_C = 1.0;
    c.omega_C_given = true;
    c.n = 1;
    return time_series_figure(c, o, {2}, false, exec);
  }
  if (id == "fig2b") {
    c.n = 3;
    return time_series_figure(c, o, {2}, true, exec);
  }
  if (id == "fig4") {
    c.n = 5;
    return time_series_figure(c, o, sizes_or(o, {1, 2, 3}), true, exec);
  }
  if (id == "fig9") {
    c.n = 5;
    c.system.g_BC = 1.4;
    c.time_points = 1200;
    return time_series_figure(c, o, {2}, true, exec);
  }
  if (id == "overlaps") {
    Artifacts art(c.out_dir);
    auto f = art.open("overlaps.csv");
    f.precision(12);
    f << "# qbattery-overlaps v1\nn,I_n,n_I_n\n";
    for (int n = 1; n <= 15; n += 2) {
      const double in = std::abs(overlap_In(n, 1.0, n));
      f << n << ',' << in << ',' << n * in << '\n';
    }
    art.plot("|I_n| at omega_C = n", {{"overlaps.csv", "n", "I_n", "|I_n|"}});
    art.plot("n |I_n|", {{"overlaps.csv", "n", "n_I_n", "n|I_n|"}});
    return art.finish(preset_manifest(c, o));
  }

  Artifacts art(c.out_dir);
  json m = preset_manifest(c, o);
  json scans = json::array();
  auto scan = [&](ScanConfig sc, const std::string& kind, const std::string& tag) {
    sc.tmax = c.tmax();
    scans.push_back(scan_into(art, tag, sc, kind, exec));
  };
  ScanConfig sc;
  sc.system = c.system;

  if (id == "fig2g") {
    sc.swept = SweptParameter::OmegaC;
    sc.grid = linear_grid(0.5, 5.5, 201);
    std::vector<Artifacts::Curve> w, e;
    for (int nb : sizes_or(o, {1, 2})) {
      sc.system.num_battery = nb;
      scan(sc, "spectrum", nb_tag(nb));
      w.push_back({"spectrum" + nb_tag(nb) + ".csv", "omega_C", "ratio_W", "N_B=" + std::to_string(nb)});
      e.push_back({"spectrum" + nb_tag(nb) + ".csv", "omega_C", "ratio_E", "N_B=" + std::to_string(nb)});
    }
    art.plot("W_B(t_max)/W_C(0)", w);
    art.plot("ergotropy(t_max)/W_C(0)", e);
  } else if (id == "fig3a" || id == "fig3b" || id == "fig5" || id == "fig6") {
    sc.battery_sizes = sizes_or(o, {1, 2, 3});
    std::vector<std::pair<int, std::string>> runs;  // (n, kind)
    if (id == "fig3a") {
      sc.swept = SweptParameter::GBC;
      sc.grid = linear_grid(0.02, 0.1, 5);
      runs = {{5, "power"}};
    } else if (id == "fig3b") {
      sc.swept = SweptParameter::ChargerWork;
      sc.grid = {1, 3, 5, 7, 9};
      runs = {{0, "power"}};
    } else if (id == "fig5") {
      sc.swept = SweptParameter::GBC;
      sc.grid = linear_grid(0.02, 0.1, 5);
      runs = {{1, "wirr"}, {3, "wirr"}, {5, "wirr"}, {9, "wirr"}};
    } else {
      sc.swept = SweptParameter::GBC;
      sc.grid = linear_grid(0.5, 1.4, 10);
      runs = {{5, "power"}, {5, "wirr"}};
    }
    for (const auto& [n, kind] : runs) {
      sc.n = n > 0 ? n : 1;
      const std::string tag = runs.size() > 1 && kind == "wirr" && id == "fig5" ? "_n" + std::to_string(n) : "";
      scan(sc, kind, tag);
      const std::string file = kind + tag + ".csv";
      if (kind == "power")
        art.plot("power " + tag, {{file, "swept", "power_ED", "ED"}, {file, "swept", "power_TLM", "TLM"}});
      else
        art.plot("W_irr " + tag, {{file, "swept", "W_irr", "W_irr"}});
    }
  } else if (id == "fig7") {
    sc.swept = SweptParameter::OmegaC;
    for (int n : {1, 3}) {
      sc.grid = linear_grid(n - 0.5, n + 0.5, 51);
      std::vector<Artifacts::Curve> curves;
      for (double gb : {-0.5, 0.5, 3.0})
        for (int nb : sizes_or(o, {1, 2})) {
          sc.system.g_B = gb;
          sc.system.num_battery = nb;
          const std::string tag = "_n" + std::to_string(n) + g_tag(gb) + nb_tag(nb);
          scan(sc, "spectrum", tag);
          curves.push_back({"spectrum" + tag + ".csv", "omega_C", "ratio_W", tag.substr(1)});
        }
      art.plot("window n=" + std::to_string(n), curves);
    }
  } else if (id == "fig8") {
    sc.swept = SweptParameter::ChargerWork;
    sc.grid = {1, 3, 5};
    sc.battery_sizes = sizes_or(o, {2});
    std::vector<Artifacts::Curve> power, tau;
    for (double gb : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      sc.system.g_B = gb;
      const std::string tag = g_tag(gb);
      scan(sc, "power", tag);
      power.push_back({"power" + tag + ".csv", "swept", "power_ED", "g_B=" + tag.substr(3)});
      tau.push_back({"power" + tag + ".csv", "swept", "tau_num", "g_B=" + tag.substr(3)});
    }
    art.plot("power vs W_C", power);
    art.plot("QSL time vs W_C", tau);
  } else {
    throw ConfigError("unknown figure id '" + id + "'");
  }
  m["scans"] = scans;
  return art.finish(m);
}

}  // namespace qbattery
