#pragma once

// Heat semigroups of Laplacians g^{ij} nabla_i nabla_j on R^n with
// nabla_k = d_k - (i/2) R_kj x^j: closed Gaussian kernels, pair matrices and
// the convolution kernel of two such semigroups.

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace speclab {

using cplx = std::complex<double>;

struct WeylModel {
  Eigen::MatrixXd g;     // positive definite
  Eigen::MatrixXd curv;  // antisymmetric R_ij
  int n() const { return static_cast<int>(g.rows()); }
};

void validate(const WeylModel& m);

/// D(t) = iR coth(t g^{-1} iR), real symmetric; g/t when R = 0.
Eigen::MatrixXd d_matrix(const WeylModel& m, double t);
/// Omega(t) = det(g^{-1} sinh(t g^{-1} iR) / (g^{-1} iR))^{-1/2}.
double omega_single(const WeylModel& m, double t);
/// Heat kernel of exp(t Delta_g):
/// (4 pi)^{-n/2} Omega exp(-<u, D u>/4 + (i/2) <x, R x'>), u = x' - x.
cplx single_kernel(const WeylModel& m, double t, const Eigen::VectorXd& x, const Eigen::VectorXd& xp);

struct WeylPair {
  WeylModel plus;
  WeylModel minus;
  /// Mixed commutator curvature (R+ + R-)/2.
  Eigen::MatrixXd cross_curv() const { return 0.5 * (plus.curv + minus.curv); }
};

void validate(const WeylPair& p);

struct PairMatrices {
  Eigen::MatrixXd D_plus, D_minus, D;
  Eigen::MatrixXcd T_plus, T_minus, Z, H, A_plus, A_minus, B;
  cplx Omega;
  double min_H = 0.0;      // smallest eigenvalue of the Hermitian part of H
  double min_block = 0.0;  // smallest eigenvalue of the real part of [[A+, -B], [-B^T, A-]]
};

/// Throws SingularD for (numerically) singular D and KernelNotBounded when
/// the Gaussian kernel fails the positivity certification.
PairMatrices pair_matrices(const WeylPair& p, double t, double s);

/// Integral kernel of exp(t Delta_+) exp(s Delta_-).
cplx convolution_kernel(const WeylPair& p, double t, double s, const Eigen::VectorXd& x, const Eigen::VectorXd& xp);
cplx convolution_kernel(const PairMatrices& pm, const Eigen::VectorXd& x, const Eigen::VectorXd& xp);

/// int dy U+(t; x, y) U-(s; y, x') by tensor Gauss-Hermite quadrature.
struct NumericConvolution {
  cplx value;
  double error = 0.0;
  int order = 0;
};
NumericConvolution numeric_convolution(const WeylPair& p, double t, double s, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& xp, double rel_tol = 1e-10);

enum class DensityMode { Auto, Integrated, PerVolume };

struct TraceDensity {
  cplx value;
  bool integrated = false;
};

/// Integral of the kernel diagonal when it is a decaying Gaussian, otherwise
/// the diagonal at x = 0 per unit volume. Integrated mode throws NonIntegrableDiagonal.
TraceDensity trace_density(const WeylPair& p, double t, double s, DensityMode mode = DensityMode::Auto);

/// Translation operator exp<xi, nabla> applied to f at x.
cplx translate(const WeylModel& m, const Eigen::VectorXd& xi, const std::function<cplx(const Eigen::VectorXd&)>& f,
               const Eigen::VectorXd& x);

}  // namespace speclab
