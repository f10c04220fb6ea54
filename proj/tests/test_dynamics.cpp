#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "qbattery/dynamics.hpp"
#include "qbattery/error.hpp"
#include "qbattery/thermo.hpp"

using namespace qbattery;

namespace {

SystemConfig small(int nb = 2, double wc = 2.95, double gb = 0.3) {
  SystemConfig c;
  c.num_battery = nb;
  c.modes_battery = 7;
  c.modes_charger = 7;
  c.omega_C = wc;
  c.g_B = gb;
  c.g_BC = 0.15;
  return c;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("config validation") {
    SystemConfig c = small();
    c.num_battery = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small();
    c.omega_C = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small();
    c.charger_level = 7;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK(small().charger_work() == 2.95);
  }

  TEST_CASE("spectral evolution matches the matrix exponential") {
    const ChargingSystem sys(small());
    const RealMatrix& h = sys.hamiltonians().H1;
    for (double t : {0.0, 0.7, 13.2}) {
      const ComplexMatrix u = (ComplexMatrix(h.cast<Complex>()) * Complex(0.0, -t)).exp();
      const ComplexVector ref = u * sys.initial().amplitudes;
      CHECK((evolve(sys.initial(), sys.spectrum(), t).amplitudes - ref).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((sys.state_at(t).amplitudes - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("norm and energy are conserved") {
    const ChargingSystem sys(small(3, 1.02, -0.2));
    const double e0 = expectation(sys.hamiltonians().H1, sys.initial());
    for (double t : {1.0, 10.0, 100.0, 1000.0}) {
      const QuantumState psi = sys.state_at(t);
      CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(expectation(sys.hamiltonians().H1, psi) == doctest::Approx(e0).epsilon(1e-11));
    }
  }

  TEST_CASE("projected expectations agree with full ones") {
    const ChargingSystem sys(small());
    for (double t : {0.0, 3.3, 41.0}) {
      const QuantumState psi = sys.state_at(t);
      const BatteryDensityMatrix rho = partial_trace_charger(psi, sys.basis(), sys.battery());
      CHECK(sys.stored_work(t) == doctest::Approx(stored_work(rho, sys.battery())).epsilon(1e-11).scale(1.0));
      CHECK(sys.interaction_energy(t) == doctest::Approx(expectation(sys.hamiltonians().Hint, psi)).epsilon(1e-11).scale(1.0));
      CHECK(sys.bare_energy(t) == doctest::Approx(expectation(sys.hamiltonians().H0, psi)).epsilon(1e-11));
    }
  }

  TEST_CASE("initial state is the battery ground state times the charger level") {
    const ChargingSystem sys(small());
    CHECK(sys.initial().norm() == doctest::Approx(1.0));
    CHECK(sys.stored_work(0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    const RealVector h0psi = sys.hamiltonians().H0 * sys.initial().amplitudes.real();
    // Eigenstate of H0 with energy E_0^B + 3/2 omega_C.
    const double e = sys.battery().ground_energy() + 1.5 * sys.config().omega_C;
    CHECK((h0psi - e * sys.initial().amplitudes.real()).cwiseAbs().maxCoeff() < 1e-11);
    SystemConfig wrong = small();
    wrong.sector = ParitySector::Even;
    CHECK_THROWS_AS(ChargingSystem{wrong}, NumericalError);
  }

  TEST_CASE("time series: serial equals parallel and starts at rest") {
    const ChargingSystem sys(small());
    const auto times = default_time_grid(sys, 40);
    const auto a = time_series(sys, times, Execution::Serial);
    const auto b = time_series(sys, times, Execution::Parallel);
    REQUIRE(a.size() == 40);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.stored_work[i] == b.stored_work[i]);
      CHECK(a.entropy[i] == b.entropy[i]);
    }
    CHECK(a.stored_work[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(a.irreversible_work[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    std::vector<double> bad = {0.0, 2.0, 1.0};
    CHECK_THROWS_AS(time_series(sys, bad), ConfigError);
  }

  TEST_CASE("propagator pruning reports dropped weight") {
    const ChargingSystem sys(small(1, 3.0, 0.0));
    const auto& p = sys.propagator();
    CHECK(p.active() <= sys.basis().size());
    CHECK(p.dropped_weight() < 1e-20);
  }
}
