#include "qbattery/integrals.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>

#include "qbattery/error.hpp"

namespace qbattery {

namespace {

QuadratureRule compute_gauss_hermite(int n) {
  // Newton iteration on the orthonormal Hermite recurrence; initial guesses
  // follow the classical asymptotic estimates for the largest zeros.
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[static_cast<std::size_t>(i - 2)];
    }
    double pp = 0.0;
    for (int its = 0; its < 100; ++its) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    // Store the positive node at the mirrored slot of the ascending layout.
    rule.nodes[static_cast<std::size_t>(i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
  }
  // Reorder: first half holds positive nodes in descending order.
  QuadratureRule sorted;
  sorted.nodes.resize(static_cast<std::size_t>(n));
  sorted.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i) {
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    const auto lo = static_cast<std::size_t>(i);
    sorted.nodes[hi] = rule.nodes[lo];
    sorted.weights[hi] = rule.weights[lo];
    sorted.nodes[lo] = -rule.nodes[lo];
    sorted.weights[lo] = rule.weights[lo];
  }
  if (n % 2 == 1) sorted.nodes[static_cast<std::size_t>(m - 1)] = 0.0;
  return sorted;
}

std::mutex& rule_mutex() {
  static std::mutex m;
  return m;
}

double polynomial_integral(const std::vector<int>& a_levels, const std::vector<int>& b_levels,
                           double omega_a, double omega_b) {
  int degree = 0;
  int max_a = 0;
  int max_b = 0;
  for (int i : a_levels) degree += i, max_a = std::max(max_a, i);
  for (int j : b_levels) degree += j, max_b = std::max(max_b, j);
  if (degree % 2 != 0) return 0.0;
  const double s = omega_a + omega_b;
  const QuadratureRule& rule = gauss_hermite_rule(quadrature_nodes_for_degree(degree));
  std::vector<double> pa(static_cast<std::size_t>(max_a) + 1);
  std::vector<double> pb(static_cast<std::size_t>(max_b) + 1);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double x = rule.nodes[q] / std::sqrt(s);
    hermite_polynomial_parts(omega_a, x, pa);
    hermite_polynomial_parts(omega_b, x, pb);
    double term = rule.weights[q];
    for (int i : a_levels) term *= pa[static_cast<std::size_t>(i)];
    for (int j : b_levels) term *= pb[static_cast<std::size_t>(j)];
    sum += term;
  }
  return sum / std::sqrt(s);
}

}  // namespace

const QuadratureRule& gauss_hermite_rule(int num_nodes) {
  if (num_nodes < 1) throw ConfigError("quadrature needs at least one node");
  static std::map<int, std::unique_ptr<QuadratureRule>> rules;
  std::lock_guard lock(rule_mutex());
  auto& slot = rules[num_nodes];
  if (!slot) slot = std::make_unique<QuadratureRule>(compute_gauss_hermite(num_nodes));
  return *slot;
}

int quadrature_nodes_for_degree(int degree) { return (degree + 1) / 2 + 1 + 8; }

double one_body_energy(const SpeciesConfig& species, int mode) {
  if (mode < 0 || mode >= species.num_modes) throw ConfigError("mode index outside the cutoff");
  return (mode + 0.5) * species.omega;
}

double two_body_contact(int i, int j, int k, int l, double omega_a, double omega_b) {
  return polynomial_integral({i, k}, {j, l}, omega_a, omega_b);
}

ContactTable::ContactTable(int modes_a, int modes_b, double omega_a, double omega_b)
    : ma_(static_cast<std::size_t>(modes_a)),
      mb_(static_cast<std::size_t>(modes_b)),
      omega_a_(omega_a),
      omega_b_(omega_b) {
  const int degree = 2 * (modes_a - 1) + 2 * (modes_b - 1);
  const QuadratureRule& rule = gauss_hermite_rule(quadrature_nodes_for_degree(degree));
  const std::size_t nq = rule.nodes.size();
  const double s = omega_a + omega_b;

  // pa[i * nq + q] = polynomial part of level i at node q, weights folded into pb pairs
  std::vector<double> pa(ma_ * nq), pb(mb_ * nq), col_a(ma_), col_b(mb_);
  for (std::size_t q = 0; q < nq; ++q) {
    const double x = rule.nodes[q] / std::sqrt(s);
    hermite_polynomial_parts(omega_a, x, col_a);
    hermite_polynomial_parts(omega_b, x, col_b);
    for (std::size_t i = 0; i < ma_; ++i) pa[i * nq + q] = col_a[i];
    for (std::size_t j = 0; j < mb_; ++j) pb[j * nq + q] = col_b[j];
  }
  const double norm = 1.0 / std::sqrt(s);
  std::vector<double> ak(nq), bjl(nq);
  data_.assign(ma_ * mb_ * ma_ * mb_, 0.0);
  for (std::size_t i = 0; i < ma_; ++i) {
    for (std::size_t k = i; k < ma_; ++k) {
      for (std::size_t q = 0; q < nq; ++q) ak[q] = rule.weights[q] * pa[i * nq + q] * pa[k * nq + q];
      for (std::size_t j = 0; j < mb_; ++j) {
        for (std::size_t l = j; l < mb_; ++l) {
          double value = 0.0;
          if ((i + j + k + l) % 2 == 0) {
            for (std::size_t q = 0; q < nq; ++q) value += ak[q] * pb[j * nq + q] * pb[l * nq + q];
            value *= norm;
          }
          auto at = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) -> double& {
            return data_[((a * mb_ + b) * ma_ + c) * mb_ + d];
          };
          at(i, j, k, l) = value;
          at(k, j, i, l) = value;
          at(i, l, k, j) = value;
          at(k, l, i, j) = value;
        }
      }
    }
  }
}

namespace {

using CacheKey = std::tuple<int, int, long long, long long>;

struct ContactCache {
  std::shared_mutex mutex;
  std::map<CacheKey, std::shared_ptr<const ContactTable>> tables;
};

ContactCache& cache() {
  static ContactCache c;
  return c;
}

long long quantize(double omega) { return std::llround(omega * 1e12); }

}  // namespace

std::shared_ptr<const ContactTable> contact_table(int modes_a, int modes_b, double omega_a,
                                                  double omega_b) {
  const CacheKey key{modes_a, modes_b, quantize(omega_a), quantize(omega_b)};
  auto& c = cache();
  {
    std::shared_lock lock(c.mutex);
    auto it = c.tables.find(key);
    if (it != c.tables.end()) return it->second;
  }
  auto table = std::make_shared<const ContactTable>(modes_a, modes_b, omega_a, omega_b);
  std::unique_lock lock(c.mutex);
  auto [it, inserted] = c.tables.emplace(key, std::move(table));
  return it->second;
}

void clear_contact_cache() {
  auto& c = cache();
  std::unique_lock lock(c.mutex);
  c.tables.clear();
}

std::size_t contact_cache_size() {
  auto& c = cache();
  std::shared_lock lock(c.mutex);
  return c.tables.size();
}

double overlap_In(int n, double omega_B, double omega_C) {
  if (n < 1) throw ConfigError("excitation index must be at least 1");
  if (n % 2 == 0) return 0.0;
  const int k = (n - 1) / 2;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  // sqrt(n! / (2^(n-1) pi)) / k!, in log space to stay finite for large n
  const double log_mag = 0.5 * (std::lgamma(n + 1.0) - (n - 1) * std::log(2.0) -
                                std::log(std::numbers::pi)) -
                         std::lgamma(k + 1.0);
  return sign * std::exp(log_mag) * omega_B * std::pow(omega_C, 0.5 * (n + 1)) /
         std::pow(omega_B + omega_C, 0.5 * (n + 2));
}

double overlap_In0_closed_form(int n, double omega_B, double omega_C) {
  const double wb = omega_B;
  const double wc = omega_C;
  const double s = wb + wc;
  const double pre = wb * std::sqrt(wb * wc) / std::sqrt(std::numbers::pi);
  const double b2 = wb * wb;
  const double c2 = wc * wc;
  switch (n) {
    case 1: return pre / std::pow(s, 1.5);
    case 3: return 0.5 * pre * (3.0 * c2 + 2.0 * b2) / std::pow(s, 3.5);
    case 5: return pre * (15.0 * c2 * c2 + 40.0 * b2 * c2 + 8.0 * b2 * b2) / (8.0 * std::pow(s, 5.5));
    case 7:
      return pre * (35.0 * c2 * c2 * c2 + 210.0 * b2 * c2 * c2 + 168.0 * b2 * b2 * c2 + 16.0 * b2 * b2 * b2) /
             (16.0 * std::pow(s, 7.5));
    case 9:
      return pre *
             (315.0 * c2 * c2 * c2 * c2 + 3360.0 * b2 * c2 * c2 * c2 + 6048.0 * b2 * b2 * c2 * c2 +
              2304.0 * b2 * b2 * b2 * c2 + 128.0 * b2 * b2 * b2 * b2) /
             (128.0 * std::pow(s, 9.5));
    default: throw ConfigError("no closed form for I_n0 at n = " + std::to_string(n));
  }
}

OverlapSet overlap_set(int n, double omega_B, double omega_C) {
  if (n < 1) throw ConfigError("excitation index must be at least 1");
  const double s = omega_B + omega_C;
  OverlapSet set;
  set.I00 = std::sqrt(omega_B * omega_C / s) / std::sqrt(std::numbers::pi);
  set.I01 = omega_C * std::sqrt(omega_B * omega_C) / (std::sqrt(std::numbers::pi) * std::pow(s, 1.5));
  if (n <= 9 && n % 2 == 1) {
    set.In0 = overlap_In0_closed_form(n, omega_B, omega_C);
  } else {
    set.In0 = two_body_contact(n, 0, n, 0, omega_B, omega_C);
  }
  set.In = overlap_In(n, omega_B, omega_C);
  return set;
}

double fermionic_overlap(int num_battery, int n, double omega_B, double omega_C) {
  if (num_battery < 1) throw ConfigError("particle number must be at least 1");
  if (n < 1) throw ConfigError("excitation index must be at least 1");
  return two_body_contact(num_battery - 1, 1, num_battery + n - 1, 0, omega_B, omega_C);
}

}  // namespace qbattery
