#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qbattery/error.hpp"
#include "qbattery/thermo.hpp"
#include "qbattery/tlm.hpp"

using namespace qbattery;

namespace {

SystemConfig small() {
  SystemConfig c;
  c.num_battery = 2;
  c.modes_battery = 8;
  c.modes_charger = 8;
  c.omega_C = 2.93;
  c.g_B = 0.4;
  c.g_BC = 0.2;
  return c;
}

}  // namespace

TEST_SUITE("thermo") {
  TEST_CASE("partial trace agrees with the dense reshaping") {
    const ChargingSystem sys(small());
    const QuantumState psi = sys.state_at(17.0);
    const auto& basis = sys.basis();
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(basis.battery_dim()),
                                          static_cast<Eigen::Index>(basis.charger_dim()));
    for (std::size_t r = 0; r < basis.size(); ++r)
      m(basis.kept_pairs[r].first, basis.kept_pairs[r].second) = psi.amplitudes(static_cast<Eigen::Index>(r));
    const ComplexMatrix ref = m * m.adjoint();
    const BatteryDensityMatrix rho = partial_trace_charger(psi, basis, sys.battery());
    CHECK((rho.rho - ref).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(rho.eigenvalues.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index i = 1; i < rho.eigenvalues.size(); ++i) CHECK(rho.eigenvalues(i) <= rho.eigenvalues(i - 1));
    // p_i = <psi_i|rho|psi_i> in the battery eigenbasis
    const RealMatrix& v = sys.battery().eigenvectors;
    for (Eigen::Index i = 0; i < 5; ++i)
      CHECK(rho.projections(i) == doctest::Approx((v.col(i).adjoint() * ref * v.col(i)).value().real()).epsilon(1e-12).scale(1.0));
    CHECK(von_neumann_entropy(rho) == doctest::Approx(von_neumann_entropy(charger_spectrum(psi, basis))).epsilon(1e-10).scale(1.0));
  }

  TEST_CASE("ergotropy of passive, pure and random states") {
    RealVector e(4);
    e << 0.0, 1.0, 2.5, 4.0;
    ComplexMatrix passive = ComplexMatrix::Zero(4, 4);
    passive.diagonal() << 0.5, 0.3, 0.15, 0.05;
    CHECK(ergotropy(passive, e) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    ComplexMatrix inverted = ComplexMatrix::Zero(4, 4);
    inverted.diagonal() << 0.05, 0.15, 0.3, 0.5;
    CHECK(ergotropy(inverted, e) == doctest::Approx(0.3 * 2.5 + 0.5 * 4 + 0.15 - (0.3 + 0.15 * 2.5 + 0.05 * 4)).epsilon(1e-13));
    ComplexVector pure(4);
    pure << 0.5, Complex(0, 0.5), -0.5, 0.5;
    const ComplexMatrix p = pure * pure.adjoint();
    const double energy = (p * e.cast<Complex>().asDiagonal()).trace().real();
    CHECK(ergotropy(p, e) == doctest::Approx(energy).epsilon(1e-13));

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const ComplexMatrix rho = oracle::random_density(4, rng);
      const double erg = ergotropy(rho, e);
      const double stored = (rho * e.cast<Complex>().asDiagonal()).trace().real() - e(0);
      CHECK(erg >= -1e-14);
      CHECK(erg <= stored + 1e-12);
      for (int k = 0; k < 50; ++k) {
        const ComplexMatrix u = oracle::haar_unitary(4, rng);
        const double extracted =
            (rho * e.cast<Complex>().asDiagonal()).trace().real() -
            (u * rho * u.adjoint() * e.cast<Complex>().asDiagonal()).trace().real();
        CHECK(extracted <= erg + 1e-12);
      }
    }
  }

  TEST_CASE("ergotropy ignores how degenerate levels are ordered") {
    RealVector e(4);
    e << 0.0, 1.0, 1.0, 2.0;
    ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
    rho.diagonal() << 0.1, 0.4, 0.2, 0.3;
    ComplexMatrix swapped = rho;
    std::swap(swapped(1, 1), swapped(2, 2));
    CHECK(ergotropy(rho, e) == doctest::Approx(ergotropy(swapped, e)).epsilon(1e-14));
  }

  TEST_CASE("von Neumann entropy") {
    RealVector flat = RealVector::Constant(5, 0.2);
    CHECK(von_neumann_entropy(flat) == doctest::Approx(std::log(5.0)));
    RealVector pure = RealVector::Zero(3);
    pure(0) = 1.0;
    CHECK(von_neumann_entropy(pure) == 0.0);
  }

  TEST_CASE("irreversible work equals the interaction-energy drop") {
    const ChargingSystem sys(small());
    const auto& h = sys.hamiltonians();
    for (double t : {5.0, 50.0}) {
      const QuantumState psi = sys.state_at(t);
      const double wirr = irreversible_work(psi, sys.initial(), h.H0);
      CHECK(wirr == doctest::Approx(expectation(h.Hint, sys.initial()) - expectation(h.Hint, psi)).epsilon(1e-11).scale(1.0));
    }
  }

  TEST_CASE("Mandelstam-Tamm bound") {
    RealMatrix h(2, 2);
    h << 0.0, 0.3, 0.3, 0.0;
    QuantumState up;
    up.amplitudes = ComplexVector::Zero(2);
    up.amplitudes(0) = 1.0;
    CHECK(qsl_numeric(up, h) == doctest::Approx(M_PI / 0.6));
    QuantumState eigen;
    eigen.amplitudes = ComplexVector::Constant(2, Complex(1.0 / std::sqrt(2.0), 0.0));
    CHECK(std::isinf(qsl_numeric(eigen, h)));
  }

  TEST_CASE("first maximum and golden section") {
    TmaxOptions o;
    const auto loc = find_first_maximum([](double t) { return std::pow(std::sin(0.5 * t), 2); }, 20.0, o, 0.1);
    CHECK(loc.t == doctest::Approx(M_PI).epsilon(1e-6));
    CHECK(loc.value == doctest::Approx(1.0).epsilon(1e-10));
    // A small early wiggle does not count as the first charging maximum.
    const auto wiggle = find_first_maximum(
        [](double t) { return std::pow(std::sin(0.1 * t), 2) + 0.01 * std::sin(5.0 * t); }, 60.0, o, 0.1);
    CHECK(wiggle.t == doctest::Approx(5 * M_PI).epsilon(2e-2));
    CHECK_THROWS_AS(find_first_maximum([](double) { return 1e-4; }, 10.0, o, 0.1), NoTransferError);
    CHECK(golden_section_maximize([](double x) { return -(x - 1.3) * (x - 1.3); }, 0.0, 4.0, 1e-9) ==
          doctest::Approx(1.3).epsilon(1e-8));
  }

  TEST_CASE("t_max on a weakly coupled resonant battery") {
    SystemConfig c;
    c.num_battery = 1;
    c.modes_battery = 8;
    c.modes_charger = 8;
    c.g_BC = 0.05;
    c.omega_C = resonance_solve(1, 1, 0.05);
    const ChargingSystem sys(c);
    const ChargingSummary s = find_t_max(sys);
    const TwoLevelParams p = tlm_params(1, 1, 0.05, 1.0, c.omega_C);
    CHECK(s.t_max == doctest::Approx(qsl_tlm(p)).epsilon(0.03));
    CHECK(s.W_max / c.omega_C > 0.95);
    CHECK(s.power == doctest::Approx(s.W_max / s.t_max));
    CHECK(qsl_secular(sys) == doctest::Approx(qsl_tlm(p)).epsilon(0.02));
  }

  TEST_CASE("even excitation is blocked") {
    SystemConfig c;
    c.num_battery = 1;
    c.modes_battery = 8;
    c.modes_charger = 8;
    c.omega_C = 2.0;
    const ChargingSystem sys(c);
    CHECK_THROWS_AS(find_t_max(sys), NoTransferError);
  }
}
