#pragma once

#include <limits>

namespace qbattery {

/// Effective two-level description of the weak-coupling charging step
/// between |0> (charger excited) and |1> (one shared battery excitation n).
struct TwoLevelParams {
  int n = 1;
  int num_battery = 1;
  double g_BC = 0.0;
  double omega_B = 1.0;
  double omega_C = 1.0;
  double delta = 0.0;  ///< <0|H1|0> - <1|H1|1>
  double J = 0.0;      ///< g_BC sqrt(N_B) |I_n|
  double Omega = 0.0;  ///< sqrt((2J)^2 + delta^2)

  bool transfers() const { return J > 0.0; }
};

TwoLevelParams tlm_params(int n, int num_battery, double g_BC, double omega_B, double omega_C);

/// Detuning from the closed-form resonance polynomials (omega_B = 1),
/// n in {1, 3, 5, 7, 9}.
double delta_poly(int n, int num_battery, double g_BC, double omega_C);

struct ResonanceOptions {
  double half_width = 0.5;
  double tolerance = 1e-10;  ///< on |delta|
  int max_widenings = 6;
};

/// Charger frequency where delta vanishes, by bisection around omega_C = n.
double resonance_solve(int n, int num_battery, double g_BC, const ResonanceOptions& options = {});

double wb_tlm(const TwoLevelParams& p, double t);
double ergotropy_tlm(const TwoLevelParams& p, double t);

/// pi / (2 J); +infinity when J = 0.
double qsl_tlm(const TwoLevelParams& p);
/// W_C(0) / tau_QSL with W_C(0) = omega_C.
double power_tlm(const TwoLevelParams& p);

/// pi / (2 g_BC |I^F_n|); +infinity for a vanishing overlap.
double qsl_fermionic(int num_battery, int n, double g_BC, double omega_B, double omega_C);

}  // namespace qbattery
