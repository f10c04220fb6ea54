#include "qbattery/tlm.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "qbattery/error.hpp"
#include "qbattery/integrals.hpp"

namespace qbattery {

TwoLevelParams tlm_params(int n, int num_battery, double g_BC, double omega_B, double omega_C) {
  if (n < 1) throw ConfigError("excitation index must be at least 1");
  if (num_battery < 1) throw ConfigError("num_battery must be at least 1");
  if (!(omega_B > 0.0) || !(omega_C > 0.0)) throw ConfigError("trap frequencies must be positive");
  const OverlapSet I = overlap_set(n, omega_B, omega_C);
  const double nb = num_battery;
  TwoLevelParams p;
  p.n = n;
  p.num_battery = num_battery;
  p.g_BC = g_BC;
  p.omega_B = omega_B;
  p.omega_C = omega_C;
  const double h00 = 0.5 * nb * omega_B + 1.5 * omega_C + nb * g_BC * I.I01;
  const double h11 = (0.5 * nb + n) * omega_B + 0.5 * omega_C + g_BC * ((nb - 1.0) * I.I00 + I.In0);
  p.delta = h00 - h11;
  p.J = std::abs(g_BC) * std::sqrt(nb) * std::abs(I.In);
  p.Omega = std::sqrt(4.0 * p.J * p.J + p.delta * p.delta);
  return p;
}

namespace {

// Bracket coefficients of omega_C^n ... omega_C^0 as (constant, N_B slope).
struct Coefficient {
  double base;
  double per_particle;
};

const std::vector<Coefficient>& poly_coefficients(int n) {
  static const std::vector<Coefficient> c1{{1, 0}, {0, -1}};
  static const std::vector<Coefficient> c3{{1, 0}, {1.5, -1}, {3, -2}, {0, -1}};
  static const std::vector<Coefficient> c5{{1, 0}, {25.0 / 8.0, -1}, {10, -4}, {5, -6}, {5, -4}, {0, -1}};
  static const std::vector<Coefficient> c7{{1, 0},   {77.0 / 16.0, -1}, {21, -6},   {175.0 / 8.0, -15},
                                           {35, -20}, {21.0 / 2.0, -15},  {7, -6},    {0, -1}};
  static const std::vector<Coefficient> c9{{1, 0},           {837.0 / 128.0, -1}, {36, -8},
                                           {231.0 / 4.0, -28}, {126, -56},          {315.0 / 4.0, -70},
                                           {84, -56},          {18, -28},           {9, -8},
                                           {0, -1}};
  switch (n) {
    case 1: return c1;
    case 3: return c3;
    case 5: return c5;
    case 7: return c7;
    case 9: return c9;
    default: throw ConfigError("no resonance polynomial for n = " + std::to_string(n));
  }
}

}  // namespace

double delta_poly(int n, int num_battery, double g_BC, double omega_C) {
  const auto& coeffs = poly_coefficients(n);
  const double nb = num_battery;
  double bracket = 0.0;
  for (const auto& c : coeffs) bracket = bracket * omega_C + (c.base + c.per_particle * nb);
  const double denom = std::pow(1.0 + omega_C, n + 0.5);
  return omega_C - n + g_BC / denom * std::sqrt(omega_C / std::numbers::pi) * bracket;
}

double resonance_solve(int n, int num_battery, double g_BC, const ResonanceOptions& options) {
  if (n < 1 || n % 2 == 0) throw ConfigError("resonances exist only for odd n");
  if (g_BC == 0.0) return static_cast<double>(n);
  const bool closed_form = n <= 9;
  auto delta = [&](double wc) {
    return closed_form ? delta_poly(n, num_battery, g_BC, wc)
                       : tlm_params(n, num_battery, g_BC, 1.0, wc).delta;
  };
  double half = options.half_width;
  for (int widen = 0; widen <= options.max_widenings; ++widen, half *= 2.0) {
    double lo = std::max(1e-6, n - half);
    double hi = n + half;
    double flo = delta(lo);
    double fhi = delta(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = delta(mid);
      if (std::abs(fm) < options.tolerance && hi - lo < 1e-12) return mid;
      if (fm == 0.0) return mid;
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
      if (hi - lo < 1e-15 * n) break;
    }
    const double root = 0.5 * (lo + hi);
    if (std::abs(delta(root)) > options.tolerance) {
      throw NumericalError("bisection stalled above the detuning tolerance");
    }
    return root;
  }
  throw NumericalError("no sign change of the detuning around omega_C = " + std::to_string(n));
}

double wb_tlm(const TwoLevelParams& p, double t) {
  if (p.Omega == 0.0) return 0.0;
  const double ratio = 2.0 * p.J / p.Omega;
  const double s = std::sin(0.5 * p.Omega * t);
  return p.n * p.omega_B * ratio * ratio * s * s;
}

double ergotropy_tlm(const TwoLevelParams& p, double t) {
  if (p.Omega == 0.0) return 0.0;
  const double ratio = 2.0 * p.J / p.Omega;
  const double s = std::sin(0.5 * p.Omega * t);
  const double x = ratio * ratio * s * s;
  return std::max((p.n - 1) * p.omega_B * x, (p.n + 1) * p.omega_B * x - p.omega_B);
}

double qsl_tlm(const TwoLevelParams& p) {
  if (p.J <= 0.0) return std::numeric_limits<double>::infinity();
  return std::numbers::pi / (2.0 * p.J);
}

double power_tlm(const TwoLevelParams& p) {
  const double tau = qsl_tlm(p);
  if (!std::isfinite(tau)) return 0.0;
  return p.omega_C / tau;
}

double qsl_fermionic(int num_battery, int n, double g_BC, double omega_B, double omega_C) {
  if (n % 2 == 0) return std::numeric_limits<double>::infinity();
  const double overlap = std::abs(g_BC * fermionic_overlap(num_battery, n, omega_B, omega_C));
  if (overlap < 1e-300) return std::numeric_limits<double>::infinity();
  return std::numbers::pi / (2.0 * overlap);
}

}  // namespace qbattery
