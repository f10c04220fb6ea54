#include "qbattery/thermo.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "qbattery/error.hpp"
#include "qbattery/integrals.hpp"

namespace qbattery {

namespace {

ComplexMatrix coefficient_matrix(const QuantumState& state, const CompositeBasis& basis) {
  if (static_cast<std::size_t>(state.amplitudes.size()) != basis.size()) {
    throw ConfigError("state does not live on this basis");
  }
  ComplexMatrix c = ComplexMatrix::Zero(static_cast<Eigen::Index>(basis.battery_dim()),
                                        static_cast<Eigen::Index>(basis.charger_dim()));
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const auto [a, ch] = basis.kept_pairs[r];
    c(a, ch) = state.amplitudes(static_cast<Eigen::Index>(r));
  }
  return c;
}

// Sorts descending, clips small negative values and renormalizes. Returns the
// clipped mass.
double clean_spectrum(RealVector& lambda) {
  std::sort(lambda.data(), lambda.data() + lambda.size(), std::greater<>());
  double clipped = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < 0.0) {
      clipped += -lambda(i);
      lambda(i) = 0.0;
    }
  }
  if (clipped >= kClipTolerance) {
    throw NumericalError("reduced density matrix has negative eigenvalues (mass " +
                         std::to_string(clipped) + "); basis truncation breakdown");
  }
  const double total = lambda.sum();
  if (total <= 0.0) throw NumericalError("reduced density matrix has zero trace");
  lambda /= total;
  return clipped;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace

BatteryDensityMatrix partial_trace_charger(const QuantumState& state, const CompositeBasis& basis,
                                           const BatteryHamiltonian& battery) {
  if (battery.dim() != basis.battery_dim()) throw ConfigError("battery Hamiltonian does not match basis");
  const ComplexMatrix c = coefficient_matrix(state, basis);
  BatteryDensityMatrix out;
  out.rho = c * c.adjoint();
  out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();

  const auto db = c.rows();
  RealVector lambda = RealVector::Zero(db);
  if (c.cols() < db) {
    // rho = C C^dagger and C^dagger C share their nonzero spectrum.
    const ComplexMatrix gram = c.adjoint() * c;
    const RealVector small = hermitian_eigenvalues(0.5 * (gram + gram.adjoint()));
    lambda.head(small.size()) = small;
  } else {
    lambda = hermitian_eigenvalues(out.rho);
  }
  out.clipped_mass = clean_spectrum(lambda);
  out.eigenvalues = std::move(lambda);

  const ComplexMatrix in_eigenbasis = battery.eigenvectors.transpose() * c;
  out.projections = in_eigenbasis.rowwise().squaredNorm();
  return out;
}

RealVector charger_spectrum(const QuantumState& state, const CompositeBasis& basis) {
  const ComplexMatrix c = coefficient_matrix(state, basis);
  const ComplexMatrix rho_c = c.transpose() * c.conjugate();
  RealVector lambda = hermitian_eigenvalues(0.5 * (rho_c + rho_c.adjoint()));
  clean_spectrum(lambda);
  return lambda;
}

double stored_work(const BatteryDensityMatrix& rho, const BatteryHamiltonian& battery) {
  return rho.projections.dot(battery.eigenvalues) - battery.ground_energy();
}

double ergotropy(const BatteryDensityMatrix& rho, const BatteryHamiltonian& battery) {
  const RealVector& eps = battery.eigenvalues;
  const auto n = std::min(rho.eigenvalues.size(), eps.size());
  double passive = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) passive += rho.eigenvalues(i) * eps(i);
  return rho.projections.dot(eps) - passive;
}

double ergotropy(const ComplexMatrix& rho, const RealVector& energies) {
  if (rho.rows() != energies.size()) throw ConfigError("density matrix and energies differ in size");
  RealVector lambda = hermitian_eigenvalues(0.5 * (rho + rho.adjoint()));
  std::sort(lambda.data(), lambda.data() + lambda.size(), std::greater<>());
  RealVector eps = energies;
  std::sort(eps.data(), eps.data() + eps.size());
  double mean = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) mean += rho(i, i).real() * energies(i);
  return mean - lambda.dot(eps);
}

double von_neumann_entropy(const RealVector& eigenvalues) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double l = eigenvalues(i);
    if (l > 0.0) s -= l * std::log(l);
  }
  return std::max(0.0, s);
}

double von_neumann_entropy(const BatteryDensityMatrix& rho) { return von_neumann_entropy(rho.eigenvalues); }

double irreversible_work(const QuantumState& state_t, const QuantumState& state_0, const RealMatrix& H0) {
  return expectation(H0, state_t) - expectation(H0, state_0);
}

double qsl_numeric(const QuantumState& state, const RealMatrix& hamiltonian) {
  const ComplexVector hpsi = hamiltonian * state.amplitudes;
  const double mean = state.amplitudes.dot(hpsi).real();
  const double variance = hpsi.squaredNorm() - mean * mean;
  if (variance <= 1e-14 * std::max(1.0, mean * mean)) return std::numeric_limits<double>::infinity();
  return std::numbers::pi / (2.0 * std::sqrt(variance));
}

double qsl_secular(const ChargingSystem& system, double window) {
  const auto& basis = system.basis();
  const auto& battery = system.battery();
  const ComplexVector v = system.hamiltonians().Hint * system.initial().amplitudes;
  ComplexMatrix vm = ComplexMatrix::Zero(static_cast<Eigen::Index>(basis.battery_dim()),
                                         static_cast<Eigen::Index>(basis.charger_dim()));
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const auto [a, c] = basis.kept_pairs[r];
    vm(a, c) = v(static_cast<Eigen::Index>(r));
  }
  const ComplexMatrix w = battery.eigenvectors.transpose() * vm;
  const double wc = basis.charger.omega;
  const int level = system.config().charger_level;
  const double e_init = battery.eigenvalues(0) + (level + 0.5) * wc;
  double variance = 0.0;
  for (Eigen::Index e = 0; e < w.rows(); ++e) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      const int mode = basis.charger_mode(static_cast<int>(c));
      if (e == 0 && mode == level) continue;
      const double energy = battery.eigenvalues(e) + (mode + 0.5) * wc;
      if (std::abs(energy - e_init) < window) variance += std::norm(w(e, c));
    }
  }
  if (variance <= 0.0) return std::numeric_limits<double>::infinity();
  return std::numbers::pi / (2.0 * std::sqrt(variance));
}

double default_horizon(const ChargingSystem& system, double horizon_factor) {
  const auto& cfg = system.config();
  const double window = 0.5 * std::min(cfg.omega_B, cfg.omega_C);
  double tau = qsl_secular(system, window);
  if (!std::isfinite(tau)) {
    int n = static_cast<int>(std::lround(cfg.charger_work() / cfg.omega_B));
    if (n % 2 == 0) n += 1;
    n = std::max(n, 1);
    const double j = std::abs(cfg.g_BC) * std::sqrt(static_cast<double>(cfg.num_battery)) *
                     std::abs(overlap_In(n, cfg.omega_B, cfg.omega_C));
    tau = j > 0.0 ? std::numbers::pi / (2.0 * j) : 100.0;
  }
  return horizon_factor * tau;
}

double golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                               double tolerance) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

namespace {

std::vector<double> sample(const std::function<double(double)>& f, const std::vector<double>& t,
                           Execution exec) {
  std::vector<double> out(t.size());
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = f(t[i]);
  } else {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = f(t[i]);
  }
  return out;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

}  // namespace

MaximumLocation find_first_maximum(const std::function<double(double)>& work, double horizon,
                                   const TmaxOptions& options, double min_work, Execution exec) {
  if (!(horizon > 0.0)) throw ConfigError("search horizon must be positive");
  for (int attempt = 0; attempt <= options.max_extensions; ++attempt, horizon *= 2.0) {
    const auto n = static_cast<std::size_t>(
        std::max<double>(options.min_coarse_points, std::ceil(horizon / options.coarse_dt)) + 1);
    const std::vector<double> t = linspace(0.0, horizon, n);
    const std::vector<double> w = sample(work, t, exec);
    const double w_max = *std::max_element(w.begin(), w.end());
    if (w_max < min_work) {
      throw NoTransferError("stored work never exceeds the transfer threshold", w_max);
    }
    const double level = options.hump_fraction * w_max;
    std::size_t i0 = 0;
    while (w[i0] < level) ++i0;
    std::size_t i1 = i0;
    while (i1 + 1 < n && w[i1 + 1] >= level) ++i1;
    if (i1 + 1 == n) continue;  // hump cut by the horizon

    const double a = t[i0 > 0 ? i0 - 1 : 0];
    const double b = t[i1 + 1];
    const double step = std::min(options.fine_dt, t[1] - t[0]);
    const auto nf = static_cast<std::size_t>(std::ceil((b - a) / step)) + 1;
    const std::vector<double> tf = linspace(a, b, std::max<std::size_t>(nf, 3));
    const std::vector<double> wf = sample(work, tf, exec);
    const auto best = static_cast<std::size_t>(std::max_element(wf.begin(), wf.end()) - wf.begin());
    const double h = tf[1] - tf[0];
    const double lo = std::max(0.0, tf[best] - h);
    const double hi = tf[best] + h;
    double t_star = golden_section_maximize(work, lo, hi, options.tolerance);
    double w_star = work(t_star);
    if (wf[best] > w_star) {
      t_star = tf[best];
      w_star = wf[best];
    }
    return MaximumLocation{t_star, w_star, horizon, w_max};
  }
  throw NumericalError("no charging maximum closes within the extended horizon");
}

ChargingSummary find_t_max(const ChargingSystem& system, const TmaxOptions& options, Execution exec) {
  const double horizon =
      options.horizon > 0.0 ? options.horizon : default_horizon(system, options.horizon_factor);
  const double min_work = options.min_transfer * system.config().charger_work();
  const auto loc = find_first_maximum([&](double t) { return system.stored_work(t); }, horizon, options,
                                      min_work, exec);
  ChargingSummary s;
  s.t_max = loc.t;
  s.horizon = loc.horizon;
  const QuantumState psi = system.state_at(loc.t);
  const BatteryDensityMatrix rho = partial_trace_charger(psi, system.basis(), system.battery());
  s.W_max = stored_work(rho, system.battery());
  s.ergotropy_at_t_max = ergotropy(rho, system.battery());
  s.S_B_at_t_max = von_neumann_entropy(rho);
  s.W_irr_at_t_max = expectation(system.hamiltonians().H0, psi) - system.initial_bare_energy();
  s.power = s.W_max / s.t_max;
  return s;
}

}  // namespace qbattery
