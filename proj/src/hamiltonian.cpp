#include "qbattery/hamiltonian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <ostream>

#include "qbattery/error.hpp"
#include "qbattery/integrals.hpp"

namespace qbattery {

namespace {

// Applies a_mode; returns false when the mode is empty.
inline bool annihilate(std::vector<int>& occ, int mode, double& amp) {
  const int n = occ[static_cast<std::size_t>(mode)];
  if (n == 0) return false;
  amp *= std::sqrt(static_cast<double>(n));
  occ[static_cast<std::size_t>(mode)] = n - 1;
  return true;
}

inline void create(std::vector<int>& occ, int mode, double& amp) {
  const int n = occ[static_cast<std::size_t>(mode)];
  amp *= std::sqrt(static_cast<double>(n + 1));
  occ[static_cast<std::size_t>(mode)] = n + 1;
}

void check_modes(const std::vector<FockState>& states, const ContactTable& table) {
  if (!states.empty() && static_cast<int>(states.front().occupations.size()) > table.modes_a()) {
    throw ConfigError("contact table smaller than the Fock basis");
  }
}

// Reference kernel: scatters every term of (1/2) g sum_ijkl U a+_i a+_j a_l a_k
// column by column, with no selection-rule shortcuts.
RealMatrix battery_matrix_serial(const std::vector<FockState>& states, double g_B, double omega_B,
                                 const ContactTable& U) {
  const auto dim = static_cast<Eigen::Index>(states.size());
  RealMatrix h = RealMatrix::Zero(dim, dim);
  if (dim == 0) return h;
  const int modes = static_cast<int>(states.front().occupations.size());
  const FockIndex index(states);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const auto& ket = states[static_cast<std::size_t>(col)].occupations;
    for (int j = 0; j < modes; ++j) h(col, col) += ket[static_cast<std::size_t>(j)] * (j + 0.5) * omega_B;
    if (g_B == 0.0) continue;
    for (int i = 0; i < modes; ++i)
      for (int j = 0; j < modes; ++j)
        for (int k = 0; k < modes; ++k)
          for (int l = 0; l < modes; ++l) {
            std::vector<int> occ = ket;
            double amp = 1.0;
            if (!annihilate(occ, k, amp) || !annihilate(occ, l, amp)) continue;
            create(occ, j, amp);
            create(occ, i, amp);
            const auto row = index.find(occ);
            if (row < 0) continue;
            h(row, col) += 0.5 * g_B * U(i, j, k, l) * amp;
          }
  }
  return h;
}

// Row-parallel kernel. The operator is real symmetric, so row a equals the
// image of ket a; only occupied (k, l) pairs and parity-allowed (i, j) pairs
// are visited.
RealMatrix battery_matrix_parallel(const std::vector<FockState>& states, double g_B, double omega_B,
                                   const ContactTable& U) {
  const auto dim = static_cast<Eigen::Index>(states.size());
  RealMatrix h = RealMatrix::Zero(dim, dim);
  if (dim == 0) return h;
  const int modes = static_cast<int>(states.front().occupations.size());
  const FockIndex index(states);
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index row = 0; row < dim; ++row) {
    const auto& bra = states[static_cast<std::size_t>(row)].occupations;
    double diag = 0.0;
    for (int j = 0; j < modes; ++j) diag += bra[static_cast<std::size_t>(j)] * (j + 0.5) * omega_B;
    h(row, row) += diag;
    if (g_B == 0.0) continue;
    std::vector<int> occ;
    for (int k = 0; k < modes; ++k) {
      if (bra[static_cast<std::size_t>(k)] == 0) continue;
      for (int l = 0; l < modes; ++l) {
        if (bra[static_cast<std::size_t>(l)] - (k == l ? 1 : 0) <= 0) continue;
        for (int i = 0; i < modes; ++i) {
          for (int j = (i + k + l) % 2; j < modes; j += 2) {
            occ = bra;
            double amp = 1.0;
            annihilate(occ, k, amp);
            annihilate(occ, l, amp);
            create(occ, j, amp);
            create(occ, i, amp);
            const auto col = index.find(occ);
            if (col < 0) continue;
            h(row, col) += 0.5 * g_B * U(i, j, k, l) * amp;
          }
        }
      }
    }
  }
  return h;
}

}  // namespace

void symmetric_eigensolve(const RealMatrix& matrix, RealVector& eigenvalues, RealMatrix& eigenvectors) {
  if (matrix.rows() != matrix.cols()) throw ConfigError("eigensolve needs a square matrix");
  if (matrix.rows() == 0) {
    eigenvalues.resize(0);
    eigenvectors.resize(0, 0);
    return;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(matrix);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  eigenvalues = solver.eigenvalues();
  eigenvectors = solver.eigenvectors();
}

RealMatrix battery_matrix(const std::vector<FockState>& states, double g_B, double omega_B,
                          Execution exec) {
  if (states.empty()) return {};
  const int modes = static_cast<int>(states.front().occupations.size());
  const auto table = contact_table(modes, modes, omega_B, omega_B);
  check_modes(states, *table);
  return exec == Execution::Serial ? battery_matrix_serial(states, g_B, omega_B, *table)
                                   : battery_matrix_parallel(states, g_B, omega_B, *table);
}

RealMatrix assemble_H0(const CompositeBasis& basis, double g_B, double omega_B, double omega_C,
                       Execution exec) {
  const RealMatrix hb = battery_matrix(basis.battery_states, g_B, omega_B, exec);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const auto db = static_cast<int>(basis.battery_dim());
  RealMatrix h0 = RealMatrix::Zero(dim, dim);
  auto fill_row = [&](Eigen::Index r) {
    const auto [a, c] = basis.kept_pairs[static_cast<std::size_t>(r)];
    for (int b = 0; b < db; ++b) {
      const double v = hb(a, b);
      if (v == 0.0) continue;
      const auto col = basis.index_of(b, c);
      if (col >= 0) h0(r, col) = v;
    }
    h0(r, r) += (basis.charger_mode(c) + 0.5) * omega_C;
  };
  if (exec == Execution::Serial) {
    for (Eigen::Index r = 0; r < dim; ++r) fill_row(r);
  } else {
#pragma omp parallel for schedule(static)
    for (Eigen::Index r = 0; r < dim; ++r) fill_row(r);
  }
  return h0;
}

namespace {

RealMatrix hint_serial(const CompositeBasis& basis, double g_BC, const ContactTable& U) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  RealMatrix h = RealMatrix::Zero(dim, dim);
  const int mb = basis.battery.num_modes;
  const int mc = basis.charger.num_modes;
  const FockIndex battery_index(basis.battery_states);
  const FockIndex charger_index(basis.charger_states);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const auto [b, d] = basis.kept_pairs[static_cast<std::size_t>(col)];
    const auto& ket = basis.battery_states[static_cast<std::size_t>(b)].occupations;
    const auto& charger_ket = basis.charger_states[static_cast<std::size_t>(d)].occupations;
    for (int i = 0; i < mb; ++i)
      for (int k = 0; k < mb; ++k) {
        std::vector<int> occ = ket;
        double amp = 1.0;
        if (!annihilate(occ, k, amp)) continue;
        create(occ, i, amp);
        const auto a = battery_index.find(occ);
        for (int j = 0; j < mc; ++j)
          for (int l = 0; l < mc; ++l) {
            std::vector<int> cocc = charger_ket;
            double camp = amp;
            if (!annihilate(cocc, l, camp)) continue;
            create(cocc, j, camp);
            const auto c = charger_index.find(cocc);
            if (a < 0 || c < 0) continue;
            const auto row = basis.index_of(static_cast<int>(a), static_cast<int>(c));
            if (row < 0) continue;
            h(row, col) += g_BC * U(i, j, k, l) * camp;
          }
      }
  }
  return h;
}

RealMatrix hint_parallel(const CompositeBasis& basis, double g_BC, const ContactTable& U) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  RealMatrix h = RealMatrix::Zero(dim, dim);
  const int mb = basis.battery.num_modes;
  const int dc = static_cast<int>(basis.charger_dim());
  const FockIndex battery_index(basis.battery_states);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index row = 0; row < dim; ++row) {
    // <a,c| a+_i a_k a+_j a_l |b,d> = <b| a+_k a_i |a> delta_{jc} delta_{ld}
    const auto [a, c] = basis.kept_pairs[static_cast<std::size_t>(row)];
    const int j = basis.charger_mode(c);
    const auto& bra = basis.battery_states[static_cast<std::size_t>(a)].occupations;
    std::vector<int> occ;
    for (int i = 0; i < mb; ++i) {
      if (bra[static_cast<std::size_t>(i)] == 0) continue;
      for (int k = 0; k < mb; ++k) {
        occ = bra;
        double amp = 1.0;
        annihilate(occ, i, amp);
        create(occ, k, amp);
        const auto b = battery_index.find(occ);
        if (b < 0) continue;
        for (int d = 0; d < dc; ++d) {
          const int l = basis.charger_mode(d);
          if ((i + j + k + l) % 2 != 0) continue;
          const auto col = basis.index_of(static_cast<int>(b), d);
          if (col < 0) continue;
          h(row, col) += g_BC * U(i, j, k, l) * amp;
        }
      }
    }
  }
  return h;
}

}  // namespace

RealMatrix assemble_Hint(const CompositeBasis& basis, double g_BC, double omega_B, double omega_C,
                         Execution exec) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  if (g_BC == 0.0) return RealMatrix::Zero(dim, dim);
  const auto table = contact_table(basis.battery.num_modes, basis.charger.num_modes, omega_B, omega_C);
  return exec == Execution::Serial ? hint_serial(basis, g_BC, *table)
                                   : hint_parallel(basis, g_BC, *table);
}

BatteryHamiltonian assemble_battery_only(int num_battery, int modes_battery, double g_B,
                                         double omega_B) {
  SpeciesConfig cfg{Species::Battery, omega_B, modes_battery, num_battery};
  cfg.validate();
  BatteryHamiltonian hb;
  hb.states = enumerate_fock_states(num_battery, modes_battery);
  hb.matrix = battery_matrix(hb.states, g_B, omega_B);
  symmetric_eigensolve(hb.matrix, hb.eigenvalues, hb.eigenvectors);
  return hb;
}

HamiltonianSet assemble_hamiltonians(std::shared_ptr<const CompositeBasis> basis,
                                     const Couplings& couplings, Execution exec) {
  if (!basis) throw ConfigError("null basis");
  HamiltonianSet set;
  const double wb = basis->battery.omega;
  const double wc = basis->charger.omega;
  set.H0 = assemble_H0(*basis, couplings.g_B, wb, wc, exec);
  set.Hint = assemble_Hint(*basis, couplings.g_BC, wb, wc, exec);
  set.H1 = set.H0 + set.Hint;
  set.battery = set.H0;
  for (Eigen::Index r = 0; r < set.battery.rows(); ++r) {
    const int c = basis->kept_pairs[static_cast<std::size_t>(r)].second;
    set.battery(r, r) -= (basis->charger_mode(c) + 0.5) * wc;
  }
  set.basis = std::move(basis);
  set.couplings = couplings;
  return set;
}

RealVector parity_diagonal(const CompositeBasis& basis) {
  RealVector p(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const auto [a, c] = basis.kept_pairs[r];
    p(static_cast<Eigen::Index>(r)) =
        basis.battery_states[static_cast<std::size_t>(a)].parity() *
        basis.charger_states[static_cast<std::size_t>(c)].parity();
  }
  return p;
}

void write_matrix_csv(std::ostream& out, const RealMatrix& m, const Couplings& couplings) {
  out.precision(17);
  out << "# qbattery-matrix v1 rows=" << m.rows() << " cols=" << m.cols() << " g_B=" << couplings.g_B
      << " g_BC=" << couplings.g_BC << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << m(r, c);
    }
    out << '\n';
  }
}

}  // namespace qbattery
