#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "qbattery/basis.hpp"

namespace qbattery {

/// Gauss-Hermite rule for the weight exp(-y^2), exact for polynomials of
/// degree <= 2 * nodes.size() - 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  /// Gaussian width s of the mapped integrand exp(-s x^2); x = y / sqrt(s).
  double scale = 1.0;
};

/// Nodes in ascending order, computed by Newton iteration on the normalized
/// Hermite recurrence. Rules are memoized per node count.
const QuadratureRule& gauss_hermite_rule(int num_nodes);

/// Node count used for an integrand whose polynomial part has `degree`.
int quadrature_nodes_for_degree(int degree);

/// (i + 1/2) omega: the basis diagonalizes the single-particle Hamiltonian.
double one_body_energy(const SpeciesConfig& species, int mode);

/// Integral of psi_i^a psi_j^b psi_k^a psi_l^b over the line, where psi^a
/// (psi^b) are oscillator eigenfunctions with frequency omega_a (omega_b).
/// The coupling constant is not included.
double two_body_contact(int i, int j, int k, int l, double omega_a, double omega_b);

/// Dense table of two_body_contact for i, k < modes_a and j, l < modes_b.
class ContactTable {
 public:
  ContactTable(int modes_a, int modes_b, double omega_a, double omega_b);

  double operator()(int i, int j, int k, int l) const {
    return data_[((static_cast<std::size_t>(i) * mb_ + j) * ma_ + k) * mb_ + l];
  }
  int modes_a() const { return static_cast<int>(ma_); }
  int modes_b() const { return static_cast<int>(mb_); }
  double omega_a() const { return omega_a_; }
  double omega_b() const { return omega_b_; }

 private:
  std::size_t ma_, mb_;
  double omega_a_, omega_b_;
  std::vector<double> data_;
};

/// Shared contact table keyed by cutoffs and frequencies quantized to 1e-12.
/// Safe to call concurrently.
std::shared_ptr<const ContactTable> contact_table(int modes_a, int modes_b, double omega_a,
                                                  double omega_b);
void clear_contact_cache();
std::size_t contact_cache_size();

/// Two-level overlap integrals for excitation n.
struct OverlapSet {
  double I00 = 0.0;  ///< int phi_0^2 varphi_0^2
  double I01 = 0.0;  ///< int phi_0^2 varphi_1^2
  double In0 = 0.0;  ///< int phi_n^2 varphi_0^2
  double In = 0.0;   ///< int phi_0 varphi_1 phi_n varphi_0
};

/// Closed-form transfer overlap for odd n; exactly 0 for even n.
double overlap_In(int n, double omega_B, double omega_C);

/// Closed-form In0 for n in {1, 3, 5, 7, 9}; throws ConfigError otherwise.
double overlap_In0_closed_form(int n, double omega_B, double omega_C);

OverlapSet overlap_set(int n, double omega_B, double omega_C);

/// int phi_{N-1} varphi_1 phi_{N+n-1} varphi_0: only the particle at the
/// Fermi surface takes part in the transfer.
double fermionic_overlap(int num_battery, int n, double omega_B, double omega_C);

}  // namespace qbattery
