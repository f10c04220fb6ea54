#include "doctest.h"
#include "oracles.hpp"
#include "qbattery/error.hpp"
#include "qbattery/integrals.hpp"
#include "qbattery/tlm.hpp"

using namespace qbattery;

TEST_SUITE("tlm") {
  TEST_CASE("detuning: bare degeneracy and worked values") {
    for (int n : {1, 3, 5, 7, 9}) CHECK(tlm_params(n, 2, 0.0, 1.0, n).delta == 0.0);
    CHECK(tlm_params(1, 2, 0.1, 1.0, 1.0).delta == doctest::Approx(-0.1 * std::sqrt(1 / M_PI) / std::pow(2.0, 1.5)).epsilon(1e-12));
    CHECK(tlm_params(1, 2, 0.1, 1.0, 1.0).delta == doctest::Approx(-0.019947).epsilon(1e-4));
    CHECK(tlm_params(3, 2, 0.1, 1.0, 3.0).delta == doctest::Approx(0.01336).epsilon(1e-3));
    CHECK(delta_poly(1, 2, 0.1, 1.0) == doctest::Approx(-0.019947).epsilon(1e-4));
  }

  TEST_CASE("detuning from oracle overlaps") {
    const int n = 5, nb = 3;
    const double g = 0.07, wc = 4.8;
    const double i01 = oracle::contact(0, 1, 0, 1, 1.0, wc);
    const double i00 = oracle::contact(0, 0, 0, 0, 1.0, wc);
    const double in0 = oracle::contact(n, 0, n, 0, 1.0, wc);
    const double ref = wc - n + g * (nb * i01 - (nb - 1) * i00 - in0);
    const auto p = tlm_params(n, nb, g, 1.0, wc);
    CHECK(p.delta == doctest::Approx(ref).epsilon(1e-11));
    CHECK(p.J == doctest::Approx(g * std::sqrt(nb) * std::abs(oracle::contact(0, 1, n, 0, 1.0, wc))).epsilon(1e-11));
    CHECK(p.Omega == doctest::Approx(std::hypot(2 * p.J, p.delta)));
  }

  TEST_CASE("detuning polynomials agree with the general detuning") {
    const double bracket = std::pow(5, 5) + (25.0 / 8 - 1) * std::pow(5, 4) + 6 * 125 - 25 + 5 - 1;
    CHECK(delta_poly(5, 1, 0.1, 5.0) ==
          doctest::Approx(bracket * 0.1 * std::sqrt(5 / M_PI) / std::pow(6.0, 5.5)).epsilon(1e-12));
    for (int n : {1, 3, 5, 7, 9})
      for (int nb : {1, 2, 3, 6})
        for (double wc = 0.3; wc < 12.0; wc += 0.37)
          CHECK(delta_poly(n, nb, 0.13, wc) == doctest::Approx(tlm_params(n, nb, 0.13, 1.0, wc).delta).epsilon(1e-12).scale(1.0));
    CHECK_THROWS_AS(delta_poly(11, 1, 0.1, 11.0), ConfigError);
  }

  TEST_CASE("resonance roots") {
    CHECK(resonance_solve(1, 2, 0.1) == doctest::Approx(1.0195).epsilon(1e-4));
    CHECK(resonance_solve(3, 2, 0.1) == doctest::Approx(2.9867).epsilon(1e-4));
    for (int n : {1, 3, 5}) CHECK(resonance_solve(n, 2, 0.0) == n);
    const double root = resonance_solve(7, 3, 0.08);
    CHECK(std::abs(tlm_params(7, 3, 0.08, 1.0, root).delta) < 1e-10);
    CHECK(std::abs(tlm_params(5, 2, 1.4, 1.0, resonance_solve(5, 2, 1.4)).delta) < 1e-10);
    CHECK_THROWS_AS(resonance_solve(2, 2, 0.1), ConfigError);
  }

  TEST_CASE("closed-form dynamics") {
    const double wc = resonance_solve(3, 2, 0.1);
    const auto p = tlm_params(3, 2, 0.1, 1.0, wc);
    CHECK(wb_tlm(p, 0.0) == 0.0);
    CHECK(ergotropy_tlm(p, 0.0) == 0.0);
    const double tq = M_PI / (2 * p.J);
    CHECK(wb_tlm(p, tq) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(ergotropy_tlm(p, tq) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(qsl_tlm(p) == doctest::Approx(tq));
    CHECK(power_tlm(p) == doctest::Approx(wc / tq));
    for (double t = 0; t < 200; t += 3.1) {
      CHECK(ergotropy_tlm(p, t) <= wb_tlm(p, t) + 1e-12);
      CHECK(wb_tlm(p, t) <= 3.0 + 1e-12);
    }
    const auto off = tlm_params(1, 2, 0.1, 1.0, 1.0);
    double peak = 0.0;
    for (double t = 0; t < 300; t += 0.05) peak = std::max(peak, wb_tlm(off, t));
    CHECK(peak < 1.0);
  }

  TEST_CASE("QSL values and particle-number scaling") {
    const auto one = tlm_params(1, 1, 0.1, 1.0, 1.0);
    const auto two = tlm_params(1, 2, 0.1, 1.0, 1.0);
    CHECK(qsl_tlm(one) == doctest::Approx(78.75).epsilon(1e-3));
    CHECK(qsl_tlm(two) == doctest::Approx(55.68).epsilon(1e-3));
    CHECK(power_tlm(two) / power_tlm(one) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::isinf(qsl_tlm(tlm_params(2, 2, 0.1, 1.0, 2.0))));
  }

  TEST_CASE("fermionic QSL") {
    CHECK(qsl_fermionic(1, 3, 0.1, 1.0, 3.0) == doctest::Approx(qsl_tlm(tlm_params(3, 1, 0.1, 1.0, 3.0))).epsilon(1e-12));
    CHECK(qsl_fermionic(3, 1, 0.1, 1.0, 1.0) > qsl_fermionic(1, 1, 0.1, 1.0, 1.0));
    CHECK(std::isinf(qsl_fermionic(2, 2, 0.1, 1.0, 2.0)));
    double prev = 0.0;
    for (int nb = 1; nb <= 6; ++nb) {
      const double t = qsl_fermionic(nb, 1, 0.1, 1.0, 1.0);
      CHECK(t >= prev);
      prev = t;
    }
  }
}
