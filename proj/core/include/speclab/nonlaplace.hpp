#pragma once

// Gaussian symbol integrals for operators -a^{mu nu} d_mu d_nu + Q with
// constant matrix-valued leading symbol.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace speclab {

/// Constant symbol H(xi) = a^{mu nu} xi_mu xi_nu with Hermitian N x N blocks.
/// In boundary problems the last coordinate is the normal one.
struct ConstantSymbol {
  int n = 1;
  int N = 1;
  std::vector<Eigen::MatrixXcd> a;  // row-major n x n array of blocks
  Eigen::MatrixXcd Q;

  const Eigen::MatrixXcd& block(int mu, int nu) const { return a[static_cast<size_t>(mu * n + nu)]; }
  Eigen::MatrixXcd symbol(std::span<const double> xi) const;

  /// a^{mu nu} = g^{mu nu} I.
  static ConstantSymbol scalar(const Eigen::MatrixXd& inverse_metric, int N, const Eigen::MatrixXcd& Q);
  /// a^{mu nu} = diag(h_1, ..., h_N) delta^{mu nu}.
  static ConstantSymbol diagonal(int n, const Eigen::VectorXd& h, const Eigen::MatrixXcd& Q);
};

void validate(const ConstantSymbol& sym);

struct SymbolBounds {
  double hmin = 0.0;          // certified lower bound of the symbol on |xi| = 1
  double hmax = 0.0;          // sampled maximum
  double hmin_sampled = 0.0;  // sampled minimum
};

/// Certifies positivity of H on the unit sphere on an angle mesh (0.05 rad, refined when
/// needed) with a Lipschitz margin. Throws NotElliptic otherwise.
SymbolBounds certify_symbol(const ConstantSymbol& sym);

/// int_0^1 exp(-(1-tau) H) X exp(-tau H) dtau for Hermitian H, via divided differences.
Eigen::MatrixXcd volterra_simplex(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& X);

struct DensityResult {
  double value = 0.0;
  double error = 0.0;
  int order = 0;
};

/// int dxi pi^{-n/2} tr exp(-H(xi)).
DensityResult a0_density(const ConstantSymbol& sym, double rel_tol = 1e-10);
/// -int dxi pi^{-n/2} tr int_0^1 exp(-(1-tau)H) Q exp(-tau H) dtau.
DensityResult a2_density(const ConstantSymbol& sym, double rel_tol = 1e-10);
/// Order t^{1/2} term -int dxi pi^{-n/2} tr int_0^1 exp(-(1-tau)H) K(xi) exp(-tau H) dtau
/// for a first order symbol K(xi) = xi_mu k^mu.
DensityResult a1_volterra(const ConstantSymbol& sym, const std::vector<Eigen::MatrixXcd>& k, double abs_tol = 1e-12);

/// Phi(lambda; xi_hat) = int domega/2pi (H(omega, xi_hat) - lambda)^{-1}.
Eigen::MatrixXcd dirichlet_phi(const ConstantSymbol& sym, std::span<const double> xi_hat, std::complex<double> lambda);

struct PsiOptions {
  double t = 1.0;                     // Psi_t(xi_hat) = Psi(sqrt(t) xi_hat)
  double contour_half_length = 0.0;   // 0 selects it from the tail bound
  double rel_tol = 1e-10;
  double tail_tol = 1e-12;
};

/// Psi = (1/2 pi i) int dlambda exp(-t lambda) d/dlambda log det Phi along a
/// contour enclosing the spectrum of H(., xi_hat).
DensityResult dirichlet_psi(const ConstantSymbol& sym, std::span<const double> xi_hat, const PsiOptions& opt = {});

/// A_1 = -sqrt(pi) int dxi_hat pi^{-(n-1)/2} Psi(xi_hat), per unit boundary volume.
DensityResult dirichlet_a1(const ConstantSymbol& sym, double rel_tol = 1e-8);

}  // namespace speclab
