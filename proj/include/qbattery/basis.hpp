#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace qbattery {

enum class Species { Battery, Charger };
enum class ParitySector { Even, Odd, Full };

std::string to_string(ParitySector sector);
ParitySector parse_sector(const std::string& name);

/// One trapped species. Natural units: hbar = m = omega_B = 1.
struct SpeciesConfig {
  Species label = Species::Battery;
  double omega = 1.0;
  int num_modes = 12;
  int num_particles = 1;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Occupation numbers over the retained single-particle oscillator levels.
struct FockState {
  std::vector<int> occupations;

  int num_particles() const;
  /// Spatial parity (-1)^(sum_j j n_j), returned as +1 or -1.
  int parity() const;
  /// Sum_j j n_j, the number of oscillator quanta.
  int quanta() const;

  friend bool operator==(const FockState&, const FockState&) = default;
};

/// Default cap on the number of Fock states of a single species.
inline constexpr std::size_t kDefaultBasisCap = 200000;

/// All multisets of N bosons over M modes in descending lexicographic order
/// of the occupation vector, so (1,0,0) precedes (0,1,0).
std::vector<FockState> enumerate_fock_states(int num_particles, int num_modes,
                                             std::size_t cap = kDefaultBasisCap);

/// Number of bosonic configurations C(N+M-1, N), saturating at SIZE_MAX.
std::size_t fock_space_dimension(int num_particles, int num_modes);

/// Hash lookup from occupation vector to its position in an enumeration.
class FockIndex {
 public:
  FockIndex() = default;
  explicit FockIndex(const std::vector<FockState>& states);

  /// Position of `occupations`, or -1 when absent.
  std::ptrdiff_t find(const std::vector<int>& occupations) const;

 private:
  struct Hash {
    std::size_t operator()(const std::vector<int>& v) const noexcept;
  };
  std::unordered_map<std::vector<int>, std::ptrdiff_t, Hash> map_;
};

/// Parity-filtered tensor product of battery and charger Fock states.
struct CompositeBasis {
  SpeciesConfig battery;
  SpeciesConfig charger;
  std::vector<FockState> battery_states;
  std::vector<FockState> charger_states;
  /// Retained (battery index, charger index) pairs, battery-major order.
  std::vector<std::pair<int, int>> kept_pairs;
  ParitySector sector = ParitySector::Full;

  std::size_t size() const { return kept_pairs.size(); }
  std::size_t battery_dim() const { return battery_states.size(); }
  std::size_t charger_dim() const { return charger_states.size(); }

  /// Composite position of (battery, charger), or -1 when outside the sector.
  std::ptrdiff_t index_of(int battery_index, int charger_index) const {
    return pair_index_[static_cast<std::size_t>(battery_index) * charger_dim() +
                       static_cast<std::size_t>(charger_index)];
  }

  /// Mode occupied by the single charger particle in charger state `c`.
  int charger_mode(int c) const { return charger_mode_[static_cast<std::size_t>(c)]; }

 private:
  friend CompositeBasis build_composite_basis(const SpeciesConfig&, const SpeciesConfig&,
                                              ParitySector);
  std::vector<std::ptrdiff_t> pair_index_;
  std::vector<int> charger_mode_;
};

CompositeBasis build_composite_basis(const SpeciesConfig& battery, const SpeciesConfig& charger,
                                     ParitySector sector);

/// L2-normalized n-th harmonic-oscillator eigenfunction with frequency omega,
/// evaluated by the normalized three-term recurrence.
double hermite_eigenfunction(int n, double omega, double x);

/// The eigenfunction with its Gaussian factor exp(-omega x^2 / 2) removed.
/// This is a polynomial of degree n; quadrature kernels work with it directly.
double hermite_polynomial_part(int n, double omega, double x);

/// Fills values[k] = hermite_polynomial_part(k, omega, x) for k < values.size().
void hermite_polynomial_parts(double omega, double x, std::vector<double>& values);

}  // namespace qbattery
