#pragma once

#include <functional>
#include <limits>

#include "qbattery/dynamics.hpp"

namespace qbattery {

/// Reduced battery state together with its spectrum and its populations in
/// the battery eigenbasis.
struct BatteryDensityMatrix {
  ComplexMatrix rho;
  RealVector eigenvalues;  ///< descending, clipped at zero, sums to one
  RealVector projections;  ///< p_i = <psi_i|rho|psi_i>, battery eigenvalues ascending
  double clipped_mass = 0.0;
};

/// Eigenvalues below -kClipTolerance are a numerical breakdown, not noise.
inline constexpr double kClipTolerance = 1e-8;

/// rho^B = Tr_C |psi><psi|. Eigenvalues come from the charger-sized Gram
/// matrix when the charger space is the smaller factor.
BatteryDensityMatrix partial_trace_charger(const QuantumState& state, const CompositeBasis& basis,
                                           const BatteryHamiltonian& battery);

/// Spectrum of the charger reduced state, descending.
RealVector charger_spectrum(const QuantumState& state, const CompositeBasis& basis);

/// Tr[H^B rho] - epsilon_0.
double stored_work(const BatteryDensityMatrix& rho, const BatteryHamiltonian& battery);

/// Sum_i (p_i - lambda_i) epsilon_i with lambda descending and epsilon ascending.
double ergotropy(const BatteryDensityMatrix& rho, const BatteryHamiltonian& battery);

/// Same as above for an arbitrary density matrix on the battery eigenbasis
/// energies `energies` (ascending); used by the brute-force oracle tests.
double ergotropy(const ComplexMatrix& rho, const RealVector& energies);

/// -sum lambda ln lambda with 0 ln 0 = 0.
double von_neumann_entropy(const RealVector& eigenvalues);
double von_neumann_entropy(const BatteryDensityMatrix& rho);

/// <H0>_t - <H0>_0.
double irreversible_work(const QuantumState& state_t, const QuantumState& state_0, const RealMatrix& H0);

/// Mandelstam-Tamm time pi / (2 dE) from the energy variance of `state`.
/// Returns +infinity for an eigenstate.
double qsl_numeric(const QuantumState& state, const RealMatrix& hamiltonian);

/// Mandelstam-Tamm time with the variance restricted to uncoupled
/// eigenstates whose bare energy lies within `window` of the initial bare
/// energy (the secular, resonant part of the coupling).
double qsl_secular(const ChargingSystem& system, double window = 0.5);

struct ChargingSummary {
  double t_max = 0.0;
  double W_max = 0.0;
  double ergotropy_at_t_max = 0.0;
  double power = 0.0;
  double W_irr_at_t_max = 0.0;
  double S_B_at_t_max = 0.0;
  double horizon = 0.0;
};

struct TmaxOptions {
  /// Search horizon; <= 0 selects horizon_factor * qsl estimate.
  double horizon = 0.0;
  double horizon_factor = 3.0;
  /// Coarse grid spacing upper bound.
  double coarse_dt = 0.25;
  int min_coarse_points = 400;
  /// Fine grid spacing inside the first charging hump.
  double fine_dt = 0.02;
  /// Golden-section tolerance on t.
  double tolerance = 1e-6;
  /// A hump is a maximal run of grid points with W_B >= fraction * max W_B.
  double hump_fraction = 0.5;
  /// Below this fraction of W_C(0) the battery counts as uncharged.
  double min_transfer = 0.02;
  int max_extensions = 3;
};

/// Location of the first charging maximum of `work` on [0, horizon].
struct MaximumLocation {
  double t = 0.0;
  double value = 0.0;
  double horizon = 0.0;
  double grid_max = 0.0;
};

/// Coarse grid, first hump, fine grid, golden-section refinement.
/// Throws NoTransferError when the grid maximum is below `min_work`.
MaximumLocation find_first_maximum(const std::function<double(double)>& work, double horizon,
                                   const TmaxOptions& options, double min_work,
                                   Execution exec = Execution::Parallel);

/// Golden-section search for a maximum of f on [a, b].
double golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                               double tolerance);

ChargingSummary find_t_max(const ChargingSystem& system, const TmaxOptions& options = {},
                           Execution exec = Execution::Parallel);

/// Default t_max horizon: horizon_factor times the secular QSL estimate,
/// falling back to the two-level estimate at the nearest odd level.
double default_horizon(const ChargingSystem& system, double horizon_factor = 3.0);

}  // namespace qbattery
