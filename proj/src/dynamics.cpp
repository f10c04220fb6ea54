#include "qbattery/dynamics.hpp"

#include <cmath>
#include <ostream>

#include "qbattery/error.hpp"
#include "qbattery/thermo.hpp"

namespace qbattery {

void SystemConfig::validate() const {
  if (num_battery < 1) throw ConfigError("num_battery must be at least 1");
  if (modes_battery < 2 || modes_charger < 2) throw ConfigError("mode cutoffs must be at least 2");
  if (!(omega_B > 0.0) || !(omega_C > 0.0)) throw ConfigError("trap frequencies must be positive");
  if (!std::isfinite(g_B) || !std::isfinite(g_BC)) throw ConfigError("couplings must be finite");
  if (charger_level < 0 || charger_level >= modes_charger) {
    throw ConfigError("charger_level must lie inside the charger cutoff");
  }
}

SpectralDecomposition SpectralDecomposition::of(const RealMatrix& hamiltonian) {
  SpectralDecomposition s;
  symmetric_eigensolve(hamiltonian, s.eigenvalues, s.eigenvectors);
  return s;
}

QuantumState initial_state(const CompositeBasis& basis, const BatteryHamiltonian& battery,
                           int charger_level) {
  if (battery.dim() != basis.battery_dim()) throw ConfigError("battery Hamiltonian does not match basis");
  if (charger_level < 0 || charger_level >= basis.charger.num_modes) {
    throw ConfigError("charger level outside the charger cutoff");
  }
  int charger_index = -1;
  for (std::size_t c = 0; c < basis.charger_dim(); ++c) {
    if (basis.charger_mode(static_cast<int>(c)) == charger_level) charger_index = static_cast<int>(c);
  }
  QuantumState state;
  state.amplitudes = ComplexVector::Zero(static_cast<Eigen::Index>(basis.size()));
  double weight = 0.0;
  for (std::size_t a = 0; a < basis.battery_dim(); ++a) {
    const double amp = battery.eigenvectors(static_cast<Eigen::Index>(a), 0);
    const auto r = basis.index_of(static_cast<int>(a), charger_index);
    if (r < 0) continue;
    state.amplitudes(r) = amp;
    weight += amp * amp;
  }
  if (weight < 1e-12) throw NumericalError("initial state has no weight in the requested parity sector");
  state.amplitudes /= std::sqrt(weight);
  return state;
}

QuantumState evolve(const QuantumState& state0, const SpectralDecomposition& spectrum, double t) {
  if (static_cast<std::size_t>(state0.amplitudes.size()) != spectrum.dim()) {
    throw ConfigError("state and spectrum live on different bases");
  }
  const RealMatrix& v = spectrum.eigenvectors;
  ComplexVector coeffs = v.transpose() * state0.amplitudes;
  const double dt = t - state0.time;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    coeffs(i) *= std::polar(1.0, -spectrum.eigenvalues(i) * dt);
  }
  QuantumState out;
  out.amplitudes = v * coeffs;
  out.time = t;
  return out;
}

double expectation(const RealMatrix& op, const QuantumState& state) {
  if (op.rows() != state.amplitudes.size() || op.cols() != op.rows()) {
    throw ConfigError("operator and state dimensions differ");
  }
  const Complex value = state.amplitudes.dot(op * state.amplitudes);
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw NumericalError("expectation value of a Hermitian operator has an imaginary part");
  }
  return value.real();
}

Propagator::Propagator(std::shared_ptr<const SpectralDecomposition> spectrum,
                       const QuantumState& state0, double prune)
    : spectrum_(std::move(spectrum)) {
  const RealMatrix& v = spectrum_->eigenvectors;
  if (v.rows() != state0.amplitudes.size()) throw ConfigError("state and spectrum sizes differ");
  const ComplexVector all = v.transpose() * state0.amplitudes;
  for (Eigen::Index i = 0; i < all.size(); ++i) {
    if (std::abs(all(i)) > prune) {
      active_.push_back(i);
    } else {
      dropped_weight_ += std::norm(all(i));
    }
  }
  const auto k = static_cast<Eigen::Index>(active_.size());
  basis_.resize(v.rows(), k);
  energies_.resize(k);
  overlaps_.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index i = active_[static_cast<std::size_t>(j)];
    basis_.col(j) = v.col(i);
    energies_(j) = spectrum_->eigenvalues(i);
    // Fold the initial time into the phases.
    overlaps_(j) = all(i) * std::polar(1.0, spectrum_->eigenvalues(i) * state0.time);
  }
}

QuantumState Propagator::at(double t) const {
  ComplexVector c(overlaps_.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = overlaps_(j) * std::polar(1.0, -energies_(j) * t);
  QuantumState out;
  out.amplitudes = basis_ * c;
  out.time = t;
  return out;
}

ProjectedOperator Propagator::project(const RealMatrix& op) const {
  return ProjectedOperator{basis_.transpose() * (op * basis_)};
}

double Propagator::expectation(const ProjectedOperator& op, double t) const {
  ComplexVector c(overlaps_.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = overlaps_(j) * std::polar(1.0, -energies_(j) * t);
  return c.dot(op.matrix * c).real();
}

ChargingSystem::ChargingSystem(const SystemConfig& config, Execution exec) : config_(config) {
  config_.validate();
  const SpeciesConfig battery{Species::Battery, config_.omega_B, config_.modes_battery,
                              config_.num_battery};
  const SpeciesConfig charger{Species::Charger, config_.omega_C, config_.modes_charger, 1};
  basis_ = std::make_shared<const CompositeBasis>(build_composite_basis(battery, charger, config_.sector));
  hamiltonians_ = assemble_hamiltonians(basis_, Couplings{config_.g_B, config_.g_BC}, exec);
  battery_ = assemble_battery_only(config_.num_battery, config_.modes_battery, config_.g_B, config_.omega_B);
  spectrum_ = std::make_shared<const SpectralDecomposition>(SpectralDecomposition::of(hamiltonians_.H1));
  initial_ = initial_state(*basis_, battery_, config_.charger_level);
  propagator_ = std::make_unique<Propagator>(spectrum_, initial_);
  battery_op_ = propagator_->project(hamiltonians_.battery);
  h0_op_ = propagator_->project(hamiltonians_.H0);
  hint_op_ = propagator_->project(hamiltonians_.Hint);
  initial_bare_energy_ = expectation(hamiltonians_.H0, initial_);
}

double ChargingSystem::stored_work(double t) const {
  return propagator_->expectation(battery_op_, t) - battery_.ground_energy();
}

double ChargingSystem::bare_energy(double t) const { return propagator_->expectation(h0_op_, t); }

double ChargingSystem::interaction_energy(double t) const {
  return propagator_->expectation(hint_op_, t);
}

void write_series_csv(std::ostream& out, const ObservableSeries& s) {
  out.precision(12);
  out << "# qbattery-series v1\n";
  out << "t,W_B,ergotropy,S_B,E_int,W_irr,E_total\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << s.times[i] << ',' << s.stored_work[i] << ',' << s.ergotropy[i] << ',' << s.entropy[i] << ','
        << s.interaction_energy[i] << ',' << s.irreversible_work[i] << ',' << s.total_energy[i] << '\n';
  }
}

ObservableSeries time_series(const ChargingSystem& system, const std::vector<double>& times,
                             Execution exec) {
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) throw ConfigError("time grid must be ascending");
  }
  const std::size_t n = times.size();
  ObservableSeries s;
  s.times = times;
  s.stored_work.resize(n);
  s.ergotropy.resize(n);
  s.entropy.resize(n);
  s.interaction_energy.resize(n);
  s.irreversible_work.resize(n);
  s.total_energy.resize(n);
  const auto& h = system.hamiltonians();
  auto point = [&](std::size_t i) {
    const QuantumState psi = system.state_at(times[i]);
    const BatteryDensityMatrix rho = partial_trace_charger(psi, system.basis(), system.battery());
    s.stored_work[i] = stored_work(rho, system.battery());
    s.ergotropy[i] = ergotropy(rho, system.battery());
    s.entropy[i] = von_neumann_entropy(rho);
    s.interaction_energy[i] = expectation(h.Hint, psi);
    s.irreversible_work[i] = expectation(h.H0, psi) - system.initial_bare_energy();
    s.total_energy[i] = expectation(h.H1, psi);
  };
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) point(i);
  } else {
    // Exceptions cannot cross the OpenMP region; capture the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t i = 0; i < n; ++i) {
      try {
        point(i);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  return s;
}

ObservableSeries time_series(const SystemConfig& config, const std::vector<double>& times,
                             Execution exec) {
  const ChargingSystem system(config, exec);
  return time_series(system, times, exec);
}

std::vector<double> default_time_grid(const ChargingSystem& system, int points) {
  if (points < 2) throw ConfigError("a time grid needs at least two points");
  const double horizon = 0.5 * default_horizon(system, 3.0);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = horizon * i / (points - 1);
  return grid;
}

}  // namespace qbattery
