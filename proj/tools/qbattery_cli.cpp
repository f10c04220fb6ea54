// Command-line front end: simulate, scan, resonance, tlm, reproduce.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qbattery/config.hpp"
#include "qbattery/error.hpp"
#include "qbattery/parallel.hpp"
#include "qbattery/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::map<std::string, std::string> collect_overrides(const std::vector<std::string>& sets, int modes_battery,
                                                     int modes_charger, const std::string& out) {
  std::map<std::string, std::string> o;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw qbattery::ConfigError("--set expects section.key=value, got '" + s + "'");
    o[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (modes_battery > 0) o["numerics.modes_battery"] = std::to_string(modes_battery);
  if (modes_charger > 0) o["numerics.modes_charger"] = std::to_string(modes_charger);
  if (!out.empty()) o["output.dir"] = out;
  return o;
}

void report(const qbattery::RunOutputs& r) {
  std::cout << "wrote " << r.files.size() << " files to " << r.directory << '\n';
  for (const auto& f : r.files) std::cout << "  " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bosonic quantum battery charged by an oscillator charger"};
  app.require_subcommand(1);

  std::string config_path, out;
  std::vector<std::string> sets;
  int threads = 0, modes_battery = 0, modes_charger = 0;
  app.add_option("--out", out, "Output directory (default: $QBATTERY_OUT or .)");
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--modes-battery", modes_battery, "Battery single-particle cutoff")->check(CLI::PositiveNumber);
  app.add_option("--modes-charger", modes_charger, "Charger single-particle cutoff")->check(CLI::PositiveNumber);

  auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", sets, "Override, e.g. --set system.g_BC=0.05");
  };
  auto* simulate = app.add_subcommand("simulate", "Time series and t_max summary for one system");
  auto* scan = app.add_subcommand("scan", "Spectrum, power or irreversible-work scan");
  auto* resonance = app.add_subcommand("resonance", "Fine-tuned resonance peak in the window of n");
  auto* tlm = app.add_subcommand("tlm", "Two-level-model predictions");
  for (auto* s : {simulate, scan, resonance, tlm}) with_config(s);
  auto* reproduce = app.add_subcommand("reproduce", "Run a figure preset");
  std::string figure;
  reproduce->add_option("figure", figure, "Figure id")->required()->check(CLI::IsMember(qbattery::figure_ids()));
  std::vector<int> battery_sizes;
  reproduce->add_option("--battery-sizes", battery_sizes, "Override the preset battery sizes")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (threads > 0) qbattery::set_threads(threads);
    if (out.empty()) out = qbattery::default_output_root();
    if (reproduce->parsed()) {
      qbattery::ReproduceOptions o;
      o.out_dir = out;
      if (modes_battery > 0) o.modes_battery = modes_battery;
      if (modes_charger > 0) o.modes_charger = modes_charger;
      o.battery_sizes = battery_sizes;
      report(qbattery::reproduce(figure, o));
      return 0;
    }
    qbattery::RunConfig config =
        qbattery::load_config(config_path, collect_overrides(sets, modes_battery, modes_charger, out));
    config.threads = threads;
    for (const auto& w : config.warnings) std::cerr << "warning: " << w << '\n';
    if (simulate->parsed()) {
      config.command = qbattery::Subcommand::Simulate;
      report(qbattery::run_simulate(config));
    } else if (scan->parsed()) {
      config.command = qbattery::Subcommand::Scan;
      report(qbattery::run_scan(config));
    } else if (resonance->parsed()) {
      config.command = qbattery::Subcommand::Resonance;
      report(qbattery::run_resonance(config));
    } else {
      config.command = qbattery::Subcommand::Tlm;
      report(qbattery::run_tlm(config));
    }
  } catch (const qbattery::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qbattery::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
