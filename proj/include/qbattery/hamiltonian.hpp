#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "qbattery/basis.hpp"
#include "qbattery/parallel.hpp"

namespace qbattery {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

struct Couplings {
  double g_B = 0.0;   ///< intra-battery contact strength
  double g_BC = 0.0;  ///< battery-charger contact strength
};

/// Dense matrices on a composite basis.
struct HamiltonianSet {
  RealMatrix H0;       ///< uncoupled battery + charger
  RealMatrix Hint;     ///< battery-charger contact term, g_BC included
  RealMatrix H1;       ///< H0 + Hint
  RealMatrix battery;  ///< battery Hamiltonian embedded as H^B (x) 1_C
  std::shared_ptr<const CompositeBasis> basis;
  Couplings couplings;
};

/// Battery-only Hamiltonian on the full (both parities) battery Fock basis.
struct BatteryHamiltonian {
  RealMatrix matrix;
  RealVector eigenvalues;   ///< ascending
  RealMatrix eigenvectors;  ///< columns
  std::vector<FockState> states;

  std::size_t dim() const { return states.size(); }
  double ground_energy() const { return eigenvalues(0); }
};

/// Symmetric eigensolve; eigenvalues ascending, eigenvectors in columns.
void symmetric_eigensolve(const RealMatrix& matrix, RealVector& eigenvalues, RealMatrix& eigenvectors);

/// Battery Hamiltonian matrix (one-body ladder plus intra-species contact) on
/// an explicit list of battery Fock states.
RealMatrix battery_matrix(const std::vector<FockState>& states, double g_B, double omega_B,
                          Execution exec = Execution::Parallel);

RealMatrix assemble_H0(const CompositeBasis& basis, double g_B, double omega_B, double omega_C,
                       Execution exec = Execution::Parallel);
RealMatrix assemble_Hint(const CompositeBasis& basis, double g_BC, double omega_B, double omega_C,
                         Execution exec = Execution::Parallel);

BatteryHamiltonian assemble_battery_only(int num_battery, int modes_battery, double g_B,
                                         double omega_B);

HamiltonianSet assemble_hamiltonians(std::shared_ptr<const CompositeBasis> basis,
                                     const Couplings& couplings,
                                     Execution exec = Execution::Parallel);

/// Total spatial parity of every composite basis state as a diagonal.
RealVector parity_diagonal(const CompositeBasis& basis);

/// Row-major dump: a text header line
///   "# qbattery-matrix v1 rows=<n> cols=<n> g_B=<g> g_BC=<g>"
/// followed by one comma-separated line per row.
void write_matrix_csv(std::ostream& out, const RealMatrix& m, const Couplings& couplings);

}  // namespace qbattery
