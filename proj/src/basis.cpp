#include "qbattery/basis.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qbattery/error.hpp"

namespace qbattery {

std::string to_string(ParitySector sector) {
  switch (sector) {
    case ParitySector::Even: return "even";
    case ParitySector::Odd: return "odd";
    case ParitySector::Full: return "full";
  }
  return "full";
}

ParitySector parse_sector(const std::string& name) {
  if (name == "even") return ParitySector::Even;
  if (name == "odd") return ParitySector::Odd;
  if (name == "full") return ParitySector::Full;
  throw ConfigError("unknown parity sector '" + name + "' (expected even, odd or full)");
}

void SpeciesConfig::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw ConfigError("trap frequency must be positive and finite");
  }
  if (num_modes < 2) throw ConfigError("at least two single-particle modes are required");
  if (num_particles < 1) throw ConfigError("at least one particle is required");
  if (label == Species::Charger && num_particles != 1) {
    throw ConfigError("the charger holds exactly one particle");
  }
}

int FockState::num_particles() const {
  int total = 0;
  for (int n : occupations) total += n;
  return total;
}

int FockState::quanta() const {
  int q = 0;
  for (std::size_t j = 0; j < occupations.size(); ++j) q += static_cast<int>(j) * occupations[j];
  return q;
}

int FockState::parity() const { return (quanta() % 2 == 0) ? 1 : -1; }

std::size_t fock_space_dimension(int num_particles, int num_modes) {
  // C(N+M-1, N) evaluated incrementally; every partial product is itself a
  // binomial coefficient so the division is exact.
  const std::size_t limit = std::numeric_limits<std::size_t>::max();
  std::size_t result = 1;
  for (int k = 1; k <= num_particles; ++k) {
    const std::size_t factor = static_cast<std::size_t>(num_modes - 1 + k);
    if (result > limit / factor) return limit;
    result = result * factor / static_cast<std::size_t>(k);
  }
  return result;
}

namespace {

void enumerate_recursive(int remaining, std::size_t mode, std::vector<int>& current,
                         std::vector<FockState>& out) {
  const std::size_t modes = current.size();
  if (mode + 1 == modes) {
    current[mode] = remaining;
    out.push_back(FockState{current});
    current[mode] = 0;
    return;
  }
  for (int n = remaining; n >= 0; --n) {
    current[mode] = n;
    enumerate_recursive(remaining - n, mode + 1, current, out);
  }
  current[mode] = 0;
}

}  // namespace

std::vector<FockState> enumerate_fock_states(int num_particles, int num_modes, std::size_t cap) {
  if (num_particles < 1) throw ConfigError("particle number must be at least 1");
  if (num_modes < 1) throw ConfigError("mode count must be at least 1");
  const std::size_t count = fock_space_dimension(num_particles, num_modes);
  if (count > cap) {
    throw ConfigError("Fock space of " + std::to_string(num_particles) + " particles in " +
                      std::to_string(num_modes) + " modes exceeds the basis-size cap (" +
                      std::to_string(cap) + ")");
  }
  std::vector<FockState> out;
  out.reserve(count);
  std::vector<int> current(static_cast<std::size_t>(num_modes), 0);
  enumerate_recursive(num_particles, 0, current, out);
  return out;
}

std::size_t FockIndex::Hash::operator()(const std::vector<int>& v) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (int n : v) {
    h ^= static_cast<std::size_t>(n) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

FockIndex::FockIndex(const std::vector<FockState>& states) {
  map_.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    map_.emplace(states[i].occupations, static_cast<std::ptrdiff_t>(i));
  }
}

std::ptrdiff_t FockIndex::find(const std::vector<int>& occupations) const {
  auto it = map_.find(occupations);
  return it == map_.end() ? -1 : it->second;
}

CompositeBasis build_composite_basis(const SpeciesConfig& battery, const SpeciesConfig& charger,
                                     ParitySector sector) {
  battery.validate();
  charger.validate();
  if (battery.label != Species::Battery || charger.label != Species::Charger) {
    throw ConfigError("composite basis expects a battery and a charger configuration");
  }

  CompositeBasis basis;
  basis.battery = battery;
  basis.charger = charger;
  basis.sector = sector;
  basis.battery_states = enumerate_fock_states(battery.num_particles, battery.num_modes);
  basis.charger_states = enumerate_fock_states(charger.num_particles, charger.num_modes);

  const std::size_t dc = basis.charger_states.size();
  basis.charger_mode_.resize(dc);
  for (std::size_t c = 0; c < dc; ++c) {
    const auto& occ = basis.charger_states[c].occupations;
    for (std::size_t j = 0; j < occ.size(); ++j) {
      if (occ[j] == 1) basis.charger_mode_[c] = static_cast<int>(j);
    }
  }

  basis.pair_index_.assign(basis.battery_states.size() * dc, -1);
  for (std::size_t b = 0; b < basis.battery_states.size(); ++b) {
    const int pb = basis.battery_states[b].parity();
    for (std::size_t c = 0; c < dc; ++c) {
      const int total = pb * basis.charger_states[c].parity();
      const bool keep = sector == ParitySector::Full ||
                        (sector == ParitySector::Even && total == 1) ||
                        (sector == ParitySector::Odd && total == -1);
      if (!keep) continue;
      basis.pair_index_[b * dc + c] = static_cast<std::ptrdiff_t>(basis.kept_pairs.size());
      basis.kept_pairs.emplace_back(static_cast<int>(b), static_cast<int>(c));
    }
  }
  if (basis.kept_pairs.empty()) {
    throw ConfigError("the requested parity sector is empty for this configuration");
  }
  return basis;
}

void hermite_polynomial_parts(double omega, double x, std::vector<double>& values) {
  if (values.empty()) return;
  const double xi = std::sqrt(omega) * x;
  values[0] = std::pow(omega / std::numbers::pi, 0.25);
  if (values.size() == 1) return;
  values[1] = std::sqrt(2.0) * xi * values[0];
  for (std::size_t n = 1; n + 1 < values.size(); ++n) {
    const double nd = static_cast<double>(n);
    values[n + 1] = std::sqrt(2.0 / (nd + 1.0)) * xi * values[n] -
                    std::sqrt(nd / (nd + 1.0)) * values[n - 1];
  }
}

double hermite_polynomial_part(int n, double omega, double x) {
  std::vector<double> values(static_cast<std::size_t>(n) + 1);
  hermite_polynomial_parts(omega, x, values);
  return values.back();
}

double hermite_eigenfunction(int n, double omega, double x) {
  // Run the recurrence on the full function so that large |x| underflows
  // gracefully instead of overflowing the polynomial part.
  const double xi = std::sqrt(omega) * x;
  double prev = 0.0;
  double cur = std::pow(omega / std::numbers::pi, 0.25) * std::exp(-0.5 * xi * xi);
  for (int k = 0; k < n; ++k) {
    const double kd = static_cast<double>(k);
    const double next = std::sqrt(2.0 / (kd + 1.0)) * xi * cur - std::sqrt(kd / (kd + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace qbattery
