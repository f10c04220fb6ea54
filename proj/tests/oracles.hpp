#pragma once
// Independent reference implementations used only by the tests.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <random>

namespace oracle {

// Oscillator eigenfunction through the standard-library physicists' Hermite
// polynomial, normalized in log space.
inline double psi(int n, double omega, double x) {
  const double xi = std::sqrt(omega) * x;
  const double log_norm = 0.25 * std::log(omega / M_PI) - 0.5 * (n * std::log(2.0) + std::lgamma(n + 1.0));
  return std::exp(log_norm - 0.5 * xi * xi) * std::hermite(static_cast<unsigned>(n), xi);
}

// Composite trapezoid rule on [-L, L]; spectrally accurate for integrands
// with Gaussian decay.
inline double integrate(const std::function<double(double)>& f, double L = 14.0, int points = 6001) {
  const double h = 2.0 * L / (points - 1);
  double s = 0.5 * (f(-L) + f(L));
  for (int i = 1; i < points - 1; ++i) s += f(-L + i * h);
  return s * h;
}

inline double contact(int i, int j, int k, int l, double wa, double wb) {
  const double L = 14.0 / std::sqrt(std::min(wa, wb));
  return integrate([&](double x) { return psi(i, wa, x) * psi(j, wb, x) * psi(k, wa, x) * psi(l, wb, x); }, L);
}

inline double binomial(int n, int k) { return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0))); }

// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
inline Eigen::MatrixXcd haar_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = {g(rng), g(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) q.col(i) *= std::polar(1.0, -std::arg(r(i, i)));
  return q;
}

// Random full-rank density matrix rho = A A^dagger / Tr.
inline Eigen::MatrixXcd random_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = {g(rng), g(rng)};
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

}  // namespace oracle
