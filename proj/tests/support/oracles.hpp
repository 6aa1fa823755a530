#pragma once

// Reference values computed without the library: brute-force sums in long
// double, closed forms and plain trapezoid quadrature.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using ld = long double;
constexpr double pi = std::numbers::pi;

/// sum_k exp(-t ((k + theta)^2 / r^2 + m2)) over |k| <= kmax.
inline double circle_theta(double t, double r = 1.0, double theta = 0.0, double m2 = 0.0, int kmax = 20000) {
  ld s = 0;
  for (int k = -kmax; k <= kmax; ++k) {
    const ld q = (k + theta) / r;
    s += std::exp(-static_cast<ld>(t) * (q * q + m2));
  }
  return static_cast<double>(s);
}

/// Dirichlet-Dirichlet (shift 0, k >= 1), Neumann-Neumann (k >= 0) or mixed
/// (half-integer modes) interval of length L.
enum class Ends { DD, NN, DN };
inline double interval_theta(double t, double L, Ends ends, int kmax = 200000) {
  ld s = 0;
  for (int k = 0; k <= kmax; ++k) {
    ld q = 0;
    if (ends == Ends::DD) {
      if (k == 0) continue;
      q = k;
    } else if (ends == Ends::NN) {
      q = k;
    } else {
      q = k + 0.5L;
    }
    const ld lam = (std::numbers::pi_v<ld> * q / L) * (std::numbers::pi_v<ld> * q / L);
    const ld term = std::exp(-static_cast<ld>(t) * lam);
    s += term;
    if (k > 10 && term < 1e-30L) break;
  }
  return static_cast<double>(s);
}

/// Eigenvalues of -u'' on [0, L] with u'(0) = -S1 u(0) and u'(L) = S2 u(L),
/// i.e. (d/dN + S) u = 0 for the inward normal. Bisection on the secular equation.
inline std::vector<double> robin_eigenvalues(double L, double S1, double S2, double lambda_max) {
  std::vector<double> out;
  auto bisect = [](const std::function<ld(ld)>& f, ld a, ld b) {
    ld fa = f(a);
    for (int i = 0; i < 200; ++i) {
      const ld m = 0.5L * (a + b);
      const ld fm = f(m);
      if ((fm < 0) == (fa < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return 0.5L * (a + b);
  };
  // Negative eigenvalues -kappa^2: (kappa^2 + S1 S2) sinh(kappa L) = kappa (S1 + S2) cosh(kappa L).
  auto neg = [&](ld kappa) {
    return (kappa * kappa + S1 * S2) * std::tanh(kappa * L) - kappa * (S1 + S2);
  };
  const ld kmax_neg = 4.0L * (std::abs(S1) + std::abs(S2)) + 10.0L;
  const int steps = 40000;
  for (int i = 0; i < steps; ++i) {
    const ld a = 1e-9L + kmax_neg * i / steps, b = 1e-9L + kmax_neg * (i + 1) / steps;
    if ((neg(a) < 0) != (neg(b) < 0)) {
      const ld k = bisect(neg, a, b);
      out.push_back(static_cast<double>(-k * k));
    }
  }
  // Positive eigenvalues k^2: (k^2 - S1 S2) sin(kL) + k (S1 + S2) cos(kL) = 0.
  auto pos = [&](ld k) { return (k * k - S1 * S2) * std::sin(k * L) + k * (S1 + S2) * std::cos(k * L); };
  const ld kend = std::sqrt(static_cast<ld>(lambda_max));
  const ld h = std::numbers::pi_v<ld> / L / 64.0L;
  for (ld a = 1e-9L; a < kend; a += h) {
    const ld b = a + h;
    if ((pos(a) < 0) != (pos(b) < 0)) {
      const ld k = bisect(pos, a, b);
      if (k * k <= lambda_max) out.push_back(static_cast<double>(k * k));
    }
  }
  return out;
}

/// sum_l (2l + 1) exp(-t l (l + 1) / r^2).
inline double sphere_theta(double t, double r = 1.0) {
  ld s = 0;
  for (int l = 0; l < 100000; ++l) {
    const ld term = (2.0L * l + 1.0L) * std::exp(-static_cast<ld>(t) * l * (l + 1.0L) / (r * r));
    s += term;
    if (l > 10 && term < 1e-30L) break;
  }
  return static_cast<double>(s);
}

/// Unit circle: sum_k exp(-beta |k|) = coth(beta / 2).
inline double circle_relativistic(double beta) { return 1.0 / std::tanh(0.5 * beta); }

/// Bose (sign -1) or Fermi (sign +1) occupation sum over lattice modes |k|^2 + m2 of a unit torus.
inline double lattice_occupation(int dim, double beta, double mu, double m2, int sign, int kmax) {
  ld s = 0;
  const int side = 2 * kmax + 1;
  long total = 1;
  for (int d = 0; d < dim; ++d) total *= side;
  for (long code = 0; code < total; ++code) {
    long c = code;
    ld q2 = 0;
    for (int d = 0; d < dim; ++d) {
      const long k = c % side - kmax;
      c /= side;
      q2 += static_cast<ld>(k) * k;
    }
    const ld x = beta * (std::sqrt(q2 + m2) - mu);
    s += 1.0L / (std::exp(x) + sign);
  }
  return static_cast<double>(s);
}

/// Massive circle A_q = 2 pi m^{2q} (up to exponentially small theta corrections).
inline double circle_aq(double q, double m2) { return 2.0 * pi * std::pow(m2, q); }

/// Unit circle, m2 = 1, q = 1/2 including the theta images: 2 pi + 2 log(1 - exp(-2 pi)).
inline double circle_aq_half() { return 2.0 * pi + 2.0 * std::log1p(-std::exp(-2.0 * pi)); }

/// Spectral zeta of the massless unit circle without zero mode: 2 zeta_R(2s).
inline double circle_zeta(double s) {
  ld z = 0;
  for (long k = 1; k <= 2000000; ++k) z += std::pow(static_cast<ld>(k), -2.0L * s);
  const ld N = 2000000.5L;  // Euler-Maclaurin midpoint tail
  z += std::pow(N, 1.0L - 2.0L * s) / (2.0L * s - 1.0L);
  return static_cast<double>(2.0L * z);
}

/// tr (I + sum_a G_a^2)^{-1/2} for commuting anti-self-adjoint G_a.
inline double commuting_gamma(const std::vector<Eigen::MatrixXcd>& whitened) {
  const auto N = whitened.front().rows();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(N, N);
  for (const auto& G : whitened) M += G * G;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()));
  double s = 0;
  for (int k = 0; k < N; ++k) s += 1.0 / std::sqrt(es.eigenvalues()(k));
  return s;
}

/// (N - tr Pi) + (1 - kappa)^{-(n-1)/2} tr Pi.
inline double clifford_gamma(int n, int N, double trPi, double kappa) {
  return (N - trPi) + std::pow(1.0 - kappa, -0.5 * (n - 1)) * trPi;
}

/// B / (4 pi sinh(t B)) as a Landau level sum sum_k (B / 2 pi) exp(-t B (2k + 1)).
inline double landau_levels(double B, double t) {
  ld s = 0;
  for (int k = 0; k < 1000000; ++k) {
    const ld term = std::exp(-static_cast<ld>(t) * B * (2.0L * k + 1.0L));
    s += term;
    if (term < 1e-30L) break;
  }
  return static_cast<double>(B / (2.0 * pi) * s);
}

/// Circle heat determinant from its mode sum: sum_k q^2 exp(-2 t q^2), q = k / r, since
/// int conj(phi_k) d phi_k = i k / r for the normalized modes.
inline double circle_heat_det(double t, double r = 1.0) {
  ld s = 0;
  for (int k = -100000; k <= 100000; ++k) {
    const ld q = k / static_cast<ld>(r);
    s += q * q * std::exp(-2.0L * t * q * q);
  }
  return static_cast<double>(s);
}

/// Bosonic Bogolyubov sum for two circles of radii r_plus, r_minus and mass m.
inline double circle_bogolyubov_bose(double beta, double r_plus, double r_minus, double m) {
  ld s = 0;
  for (int k = -20000; k <= 20000; ++k) {
    const ld wp = std::sqrt(static_cast<ld>(k) * k / (r_plus * r_plus) + m * m);
    const ld wm = std::sqrt(static_cast<ld>(k) * k / (r_minus * r_minus) + m * m);
    const ld f = 1.0L / (std::exp(beta * wp) + 1) - 1.0L / (std::exp(beta * wm) + 1);
    const ld b = 1.0L / std::expm1(beta * wp) - 1.0L / std::expm1(beta * wm);
    s += f * b;
  }
  return static_cast<double>(s);
}

/// Trapezoid rule for int_{R^n} f over [-L, L]^n, n <= 3 (spectrally accurate for Gaussians).
inline std::complex<double> trapezoid(int n, double L, int points,
                                      const std::function<std::complex<double>(const Eigen::VectorXd&)>& f) {
  const double h = 2.0 * L / (points - 1);
  std::complex<long double> s = 0;
  long total = 1;
  for (int d = 0; d < n; ++d) total *= points;
  Eigen::VectorXd y(n);
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (int d = 0; d < n; ++d) {
      y(d) = -L + h * static_cast<double>(c % points);
      c /= points;
    }
    const auto v = f(y);
    s += std::complex<long double>(v.real(), v.imag());
  }
  const double w = std::pow(h, n);
  return {static_cast<double>(s.real()) * w, static_cast<double>(s.imag()) * w};
}

}  // namespace oracle
