#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <memory>
#include <vector>

#include "qbattery/basis.hpp"
#include "qbattery/hamiltonian.hpp"
#include "qbattery/parallel.hpp"

namespace qbattery {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Physical and truncation parameters of one battery-charger quench.
struct SystemConfig {
  int num_battery = 2;
  int modes_battery = 12;
  int modes_charger = 12;
  double omega_B = 1.0;
  double omega_C = 1.0;
  double g_B = 0.0;
  double g_BC = 0.1;
  int charger_level = 1;
  ParitySector sector = ParitySector::Odd;

  void validate() const;
  /// Energy initially stored in the charger above its ground state.
  double charger_work() const { return charger_level * omega_C; }
};

/// Eigenpairs of a real symmetric Hamiltonian, eigenvalues ascending.
struct SpectralDecomposition {
  RealVector eigenvalues;
  RealMatrix eigenvectors;

  static SpectralDecomposition of(const RealMatrix& hamiltonian);
  std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

struct QuantumState {
  ComplexVector amplitudes;
  double time = 0.0;

  double norm() const { return amplitudes.norm(); }
};

/// Battery ground state (from the battery-only diagonalization) times the
/// charger oscillator level `charger_level`, restricted to the basis sector.
QuantumState initial_state(const CompositeBasis& basis, const BatteryHamiltonian& battery,
                           int charger_level = 1);

/// Exact spectral evolution: sum_i <Phi_i|psi0> exp(-i E_i t) |Phi_i>.
QuantumState evolve(const QuantumState& state0, const SpectralDecomposition& spectrum, double t);

/// Re <psi|O|psi>; throws NumericalError if the imaginary residue exceeds 1e-10.
double expectation(const RealMatrix& op, const QuantumState& state);

/// Operator in the eigenbasis of H1 restricted to the active eigenvectors of
/// a Propagator.
struct ProjectedOperator {
  RealMatrix matrix;
};

/// Spectral propagator that keeps only eigenvectors whose overlap with the
/// initial state exceeds `prune` in magnitude. The discarded norm is
/// reported by dropped_weight().
class Propagator {
 public:
  Propagator(std::shared_ptr<const SpectralDecomposition> spectrum, const QuantumState& state0,
             double prune = 1e-13);

  QuantumState at(double t) const;
  ProjectedOperator project(const RealMatrix& op) const;
  /// <O>(t) evaluated in the active eigenbasis, O(k^2) per call.
  double expectation(const ProjectedOperator& op, double t) const;

  std::size_t active() const { return static_cast<std::size_t>(active_.size()); }
  double dropped_weight() const { return dropped_weight_; }
  const SpectralDecomposition& spectrum() const { return *spectrum_; }

 private:
  std::shared_ptr<const SpectralDecomposition> spectrum_;
  std::vector<Eigen::Index> active_;
  RealMatrix basis_;        // active eigenvectors as columns
  RealVector energies_;     // active eigenvalues
  ComplexVector overlaps_;  // <Phi_i|psi0> for active i
  double dropped_weight_ = 0.0;
};

/// Fully assembled quench problem: basis, Hamiltonians, battery spectrum,
/// coupled spectrum and initial state.
class ChargingSystem {
 public:
  explicit ChargingSystem(const SystemConfig& config, Execution exec = Execution::Parallel);

  const SystemConfig& config() const { return config_; }
  const CompositeBasis& basis() const { return *basis_; }
  std::shared_ptr<const CompositeBasis> basis_ptr() const { return basis_; }
  const HamiltonianSet& hamiltonians() const { return hamiltonians_; }
  const BatteryHamiltonian& battery() const { return battery_; }
  const SpectralDecomposition& spectrum() const { return *spectrum_; }
  const QuantumState& initial() const { return initial_; }
  const Propagator& propagator() const { return *propagator_; }

  QuantumState state_at(double t) const { return propagator_->at(t); }
  /// W_B(t) through the projected battery Hamiltonian.
  double stored_work(double t) const;
  double bare_energy(double t) const;
  double interaction_energy(double t) const;

  double initial_bare_energy() const { return initial_bare_energy_; }

 private:
  SystemConfig config_;
  std::shared_ptr<const CompositeBasis> basis_;
  HamiltonianSet hamiltonians_;
  BatteryHamiltonian battery_;
  std::shared_ptr<const SpectralDecomposition> spectrum_;
  QuantumState initial_;
  std::unique_ptr<Propagator> propagator_;
  ProjectedOperator battery_op_, h0_op_, hint_op_;
  double initial_bare_energy_ = 0.0;
};

/// Time series of the charging observables on a common grid.
struct ObservableSeries {
  std::vector<double> times;
  std::vector<double> stored_work;
  std::vector<double> ergotropy;
  std::vector<double> entropy;
  std::vector<double> interaction_energy;
  std::vector<double> irreversible_work;
  std::vector<double> total_energy;

  std::size_t size() const { return times.size(); }
};

/// CSV columns: t,W_B,ergotropy,S_B,E_int,W_irr,E_total after a
/// "# qbattery-series v1" header line.
void write_series_csv(std::ostream& out, const ObservableSeries& series);

ObservableSeries time_series(const ChargingSystem& system, const std::vector<double>& times,
                             Execution exec = Execution::Parallel);
ObservableSeries time_series(const SystemConfig& config, const std::vector<double>& times,
                             Execution exec = Execution::Parallel);

/// `points` equally spaced times over [0, 1.5 * qsl estimate].
std::vector<double> default_time_grid(const ChargingSystem& system, int points = 600);

}  // namespace qbattery
