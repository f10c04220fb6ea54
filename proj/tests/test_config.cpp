#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "qbattery/config.hpp"
#include "qbattery/error.hpp"
#include "qbattery/runner.hpp"

using namespace qbattery;

namespace {

const char* kMinimal = "[system]\nnum_battery = 2\ng_BC = 0.1\nomega_C = 3\n";

int run_cli(const std::string& args) {
  const int status = std::system((std::string(QBATTERY_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal config fills defaults") {
    const RunConfig c = parse_config(kMinimal);
    CHECK(c.system.num_battery == 2);
    CHECK(c.system.modes_battery == 12);
    CHECK(c.system.modes_charger == 12);
    CHECK(c.system.sector == ParitySector::Odd);
    CHECK(c.system.omega_C == 3.0);
    CHECK(c.target_excitation() == 3);
    CHECK(c.warnings.empty());
  }

  TEST_CASE("unknown, missing and malformed keys are errors") {
    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "colour = red\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "[plots]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[system]\nnum_battery = 2\nomega_C = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[system]\nnum_battery = 2\ng_BC = 0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[system]\nnum_battery = two\ng_BC = 0.1\nn = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[system]\nnum_battery = 2.5\ng_BC = 0.1\nn = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(kMinimal, {{"numerics.tolerance", "-1"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(kMinimal, {{"numerics.speed", "1"}}), ConfigError);
  }

  TEST_CASE("warnings for attractive coupling and small cutoffs") {
    const RunConfig neg = parse_config(kMinimal, {{"system.g_BC", "-0.1"}});
    CHECK(neg.system.g_BC == -0.1);
    CHECK(neg.warnings.size() == 1);
    const RunConfig small = parse_config(kMinimal, {{"numerics.modes_battery", "4"}, {"system.n", "5"}});
    REQUIRE(small.warnings.size() == 1);
    CHECK(small.warnings[0].find("modes_battery=4") != std::string::npos);
  }

  TEST_CASE("overrides win and the INI rendering round-trips") {
    RunConfig c = parse_config(std::string(kMinimal) + "[scan]\nvalues = 0.02, 0.05\nbattery_sizes = 1,2,3\n",
                               {{"system.g_B", "-0.5"}});
    CHECK(c.system.g_B == -0.5);
    CHECK(c.grid() == std::vector<double>{0.02, 0.05});
    const RunConfig back = parse_config(to_ini(c));
    CHECK(to_ini(back) == to_ini(c));
    CHECK(back.battery_sizes == std::vector<int>{1, 2, 3});
  }

  TEST_CASE("resonant omega_C from n") {
    const RunConfig c = parse_config("[system]\nnum_battery = 2\ng_BC = 0.1\nn = 3\n");
    CHECK(c.resolved_system().omega_C == doctest::Approx(2.9867).epsilon(1e-4));
  }

  TEST_CASE("output root from the environment") {
    setenv("QBATTERY_OUT", "/tmp/qb-out", 1);
    CHECK(default_output_root() == "/tmp/qb-out");
    unsetenv("QBATTERY_OUT");
    CHECK(default_output_root() == ".");
  }

  TEST_CASE("CLI exit codes") {
    const auto dir = std::filesystem::temp_directory_path() / "qbattery-cli-test";
    std::filesystem::remove_all(dir);
    const std::string ok = temp_file("qb_ok.ini", "[system]\nnum_battery = 1\ng_BC = 0.1\nn = 1\n");
    const std::string bad = temp_file("qb_bad.ini", "[system]\nnum_battery = 1\ng_BC = 0.1\nn = 1\nwidth = 3\n");
    const std::string even = temp_file("qb_even.ini", "[system]\nnum_battery = 1\ng_BC = 0.1\nn = 2\n");
    CHECK(run_cli("--out " + dir.string() + " tlm --config " + ok) == 0);
    CHECK(std::filesystem::exists(dir / "tlm.csv"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    CHECK(run_cli("tlm --config " + bad) == 2);
    CHECK(run_cli("reproduce fig42") == 2);
    CHECK(run_cli("--out " + dir.string() + " tlm --config " + even) == 2);
    CHECK(run_cli("--out " + dir.string() + " --modes-battery 6 --modes-charger 6 simulate --config " + ok +
                  " --set system.omega_C=2.0 --set numerics.horizon=50") == 0);
    CHECK(run_cli("--out " + dir.string() + " simulate --config " + ok + " --set system.sector=even") == 3);
  }

  TEST_CASE("overlaps preset writes its artifacts") {
    ReproduceOptions o;
    o.out_dir = (std::filesystem::temp_directory_path() / "qbattery-reproduce-test").string();
    const RunOutputs r = reproduce("overlaps", o);
    CHECK(std::filesystem::exists(std::filesystem::path(r.directory) / "overlaps.csv"));
    CHECK(std::filesystem::exists(std::filesystem::path(r.directory) / "plot.py"));
    CHECK(r.manifest["figure"] == "overlaps");
    CHECK_THROWS_AS(reproduce("fig1", o), ConfigError);
  }
}
