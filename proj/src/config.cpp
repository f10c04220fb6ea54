#include "qbattery/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "qbattery/error.hpp"
#include "qbattery/tlm.hpp"

namespace qbattery {

namespace pt = boost::property_tree;

std::string to_string(Subcommand c) {
  switch (c) {
    case Subcommand::Simulate: return "simulate";
    case Subcommand::Scan: return "scan";
    case Subcommand::Resonance: return "resonance";
    case Subcommand::Tlm: return "tlm";
    case Subcommand::Reproduce: return "reproduce";
  }
  return "?";
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"system", {"num_battery", "omega_B", "omega_C", "n", "g_B", "g_BC", "charger_level", "sector"}},
      {"numerics",
       {"modes_battery", "modes_charger", "horizon", "time_points", "coarse_dt", "fine_dt", "tolerance",
        "threads"}},
      {"scan", {"kind", "swept", "min", "max", "points", "values", "battery_sizes", "convergence"}},
      {"output", {"dir", "figure"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || trim(v.substr(pos)) != "" || !std::isfinite(x))
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::round(x) || std::abs(x) > 1e9) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

template <class T, class F>
std::vector<T> to_list(const std::string& v, F&& convert) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(convert(item));
  }
  return out;
}

void assign(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto d = [&] { return to_double(key, v); };
  auto i = [&] { return to_int(key, v); };
  SystemConfig& s = c.system;
  if (key == "system.num_battery") s.num_battery = i();
  else if (key == "system.omega_B") s.omega_B = d();
  else if (key == "system.omega_C") { s.omega_C = d(); c.omega_C_given = true; }
  else if (key == "system.n") c.n = i();
  else if (key == "system.g_B") s.g_B = d();
  else if (key == "system.g_BC") s.g_BC = d();
  else if (key == "system.charger_level") s.charger_level = i();
  else if (key == "system.sector") s.sector = parse_sector(v);
  else if (key == "numerics.modes_battery") s.modes_battery = i();
  else if (key == "numerics.modes_charger") s.modes_charger = i();
  else if (key == "numerics.horizon") c.horizon = d();
  else if (key == "numerics.time_points") c.time_points = i();
  else if (key == "numerics.coarse_dt") c.coarse_dt = d();
  else if (key == "numerics.fine_dt") c.fine_dt = d();
  else if (key == "numerics.tolerance") c.tolerance = d();
  else if (key == "numerics.threads") c.threads = i();
  else if (key == "scan.kind") c.scan_kind = v;
  else if (key == "scan.swept") c.swept = parse_swept(v);
  else if (key == "scan.min") c.grid_min = d();
  else if (key == "scan.max") c.grid_max = d();
  else if (key == "scan.points") c.grid_points = i();
  else if (key == "scan.values") c.grid_values = to_list<double>(v, [&](const std::string& x) { return to_double(key, x); });
  else if (key == "scan.battery_sizes") c.battery_sizes = to_list<int>(v, [&](const std::string& x) { return to_int(key, x); });
  else if (key == "scan.convergence") c.convergence_check = to_bool(key, v);
  else if (key == "output.dir") c.out_dir = v;
  else if (key == "output.figure") c.figure = v;
  else throw ConfigError("unknown key '" + key + "'");
}

void check_key(const std::string& key) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) throw ConfigError("key '" + key + "' must be written as section.key");
  const auto section = schema().find(key.substr(0, dot));
  if (section == schema().end()) throw ConfigError("unknown section '" + key.substr(0, dot) + "'");
  if (!section->second.count(key.substr(dot + 1))) throw ConfigError("unknown key '" + key + "'");
}

void validate(RunConfig& c, const std::set<std::string>& seen) {
  for (const char* req : {"system.num_battery", "system.g_BC"})
    if (!seen.count(req)) throw ConfigError(std::string("missing required key '") + req + "'");
  if (!seen.count("system.omega_C") && !seen.count("system.n"))
    throw ConfigError("one of system.omega_C or system.n is required");
  c.system.validate();
  if (c.n < 0) throw ConfigError("system.n must be >= 0");
  if (!(c.horizon >= 0.0)) throw ConfigError("numerics.horizon must be >= 0");
  if (c.time_points < 2) throw ConfigError("numerics.time_points must be >= 2");
  if (!(c.coarse_dt > 0.0) || !(c.fine_dt > 0.0) || !(c.tolerance > 0.0))
    throw ConfigError("numerics step sizes and tolerances must be > 0");
  if (c.threads < 0) throw ConfigError("numerics.threads must be >= 0");
  static const std::set<std::string> kinds = {"spectrum", "power", "wirr", "resonance"};
  if (!kinds.count(c.scan_kind)) throw ConfigError("scan.kind must be spectrum, power, wirr or resonance");
  if (c.grid_values.empty() && (c.grid_points < 1 || !(c.grid_max >= c.grid_min)))
    throw ConfigError("scan grid needs points >= 1 and max >= min");

  if (c.system.g_BC < 0.0)
    c.warnings.push_back("g_BC < 0: attractive battery-charger coupling lies outside the studied regime");
  const int n = c.target_excitation();
  if (n > 0) {
    if (c.system.modes_battery < n + 4)
      c.warnings.push_back("modes_battery=" + std::to_string(c.system.modes_battery) + " is below n+4=" +
                           std::to_string(n + 4) + " for target n=" + std::to_string(n));
    if (c.system.modes_charger < c.system.charger_level + 4)
      c.warnings.push_back("modes_charger=" + std::to_string(c.system.modes_charger) +
                           " leaves fewer than 4 levels above the charger level");
  }
}

}  // namespace

int RunConfig::target_excitation() const {
  if (n > 0) return n;
  return static_cast<int>(std::lround(system.charger_work() / system.omega_B));
}

TmaxOptions RunConfig::tmax() const {
  TmaxOptions o;
  o.horizon = horizon;
  o.coarse_dt = coarse_dt;
  o.fine_dt = fine_dt;
  o.tolerance = tolerance;
  return o;
}

std::vector<double> RunConfig::grid() const {
  return grid_values.empty() ? linear_grid(grid_min, grid_max, grid_points) : grid_values;
}

SystemConfig RunConfig::resolved_system() const {
  SystemConfig s = system;
  if (!omega_C_given && n > 0) s.omega_C = resonance_solve(n, s.num_battery, s.g_BC);
  return s;
}

ScanConfig RunConfig::scan() const {
  ScanConfig sc;
  sc.swept = swept;
  sc.system = resolved_system();
  sc.n = target_excitation();
  sc.grid = grid();
  sc.battery_sizes = battery_sizes;
  sc.tmax = tmax();
  sc.convergence_check = convergence_check;
  return sc;
}

RunConfig parse_config(const std::string& text, const std::map<std::string, std::string>& overrides) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  std::map<std::string, std::string> values;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' appears outside a section");
    for (const auto& [key, value] : body) values[section + "." + key] = value.data();
  }
  for (const auto& [key, value] : overrides) values[key] = value;

  RunConfig c;
  std::set<std::string> seen;
  for (const auto& [key, value] : values) {
    check_key(key);
    assign(c, key, value);
    seen.insert(key);
  }
  validate(c, seen);
  return c;
}

RunConfig load_config(const std::string& path, const std::map<std::string, std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream o;
  o.precision(17);
  auto join = [](const auto& v) {
    std::ostringstream s;
    s.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    return s.str();
  };
  const SystemConfig& s = c.system;
  o << "[system]\n"
    << "num_battery = " << s.num_battery << "\n"
    << "omega_B = " << s.omega_B << "\n";
  if (c.omega_C_given) o << "omega_C = " << s.omega_C << "\n";
  if (c.n > 0) o << "n = " << c.n << "\n";
  o << "g_B = " << s.g_B << "\n"
    << "g_BC = " << s.g_BC << "\n"
    << "charger_level = " << s.charger_level << "\n"
    << "sector = " << to_string(s.sector) << "\n\n"
    << "[numerics]\n"
    << "modes_battery = " << s.modes_battery << "\n"
    << "modes_charger = " << s.modes_charger << "\n"
    << "horizon = " << c.horizon << "\n"
    << "time_points = " << c.time_points << "\n"
    << "coarse_dt = " << c.coarse_dt << "\n"
    << "fine_dt = " << c.fine_dt << "\n"
    << "tolerance = " << c.tolerance << "\n"
    << "threads = " << c.threads << "\n\n"
    << "[scan]\n"
    << "kind = " << c.scan_kind << "\n"
    << "swept = " << to_string(c.swept) << "\n"
    << "min = " << c.grid_min << "\n"
    << "max = " << c.grid_max << "\n"
    << "points = " << c.grid_points << "\n";
  if (!c.grid_values.empty()) o << "values = " << join(c.grid_values) << "\n";
  if (!c.battery_sizes.empty()) o << "battery_sizes = " << join(c.battery_sizes) << "\n";
  o << "convergence = " << (c.convergence_check ? "true" : "false") << "\n\n"
    << "[output]\n"
    << "dir = " << c.out_dir << "\n";
  if (!c.figure.empty()) o << "figure = " << c.figure << "\n";
  return o.str();
}

std::string default_output_root() {
  const char* env = std::getenv("QBATTERY_OUT");
  return env && *env ? env : ".";
}

}  // namespace qbattery
