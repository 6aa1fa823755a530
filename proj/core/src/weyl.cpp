#include "speclab/weyl.hpp"

#include <cmath>
#include <numbers>

#include "speclab/errors.hpp"
#include "speclab/numerics.hpp"

namespace speclab {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr cplx I{0.0, 1.0};

// Spectral data of the symmetrized pencil S = g^{-1/2} R g^{-1/2}:
// S^T S = V diag(y) V^T, all even matrix functions of g^{-1} iR reduce to it.
struct Pencil {
  MatrixXd g_half;
  VectorXd y;
  MatrixXd V;
  double log_det_g = 0.0;
};

Pencil pencil(const WeylModel& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eg(m.g);
  const VectorXd w = eg.eigenvalues();
  Pencil p;
  p.g_half = eg.eigenvectors() * w.cwiseSqrt().asDiagonal() * eg.eigenvectors().transpose();
  const MatrixXd g_mhalf = eg.eigenvectors() * w.cwiseSqrt().cwiseInverse().asDiagonal() * eg.eigenvectors().transpose();
  const MatrixXd S = g_mhalf * m.curv * g_mhalf;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S.transpose() * S);
  p.y = es.eigenvalues().cwiseMax(0.0);
  p.V = es.eigenvectors();
  p.log_det_g = w.array().log().sum();
  return p;
}

MatrixXd symmetrize(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

double min_eig(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double min_herm_eig(const MatrixXcd& a) {
  const MatrixXcd h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

cplx bilinear(const VectorXd& x, const MatrixXcd& a, const VectorXd& y) {
  return x.cast<cplx>().dot(a * y.cast<cplx>());
}

void require_point(const VectorXd& x, int n, const char* what) {
  require(x.size() == n, ErrorCode::InvalidArgument, std::string(what) + " has wrong dimension");
  require(x.allFinite(), ErrorCode::InvalidArgument, std::string(what) + " must be finite");
}

void require_times(double t, double s) {
  require(std::isfinite(t) && t > 0.0 && std::isfinite(s) && s > 0.0, ErrorCode::InvalidArgument,
          "times must be positive");
}

}  // namespace

void validate(const WeylModel& m) {
  const auto n = m.g.rows();
  require(n >= 1 && m.g.cols() == n, ErrorCode::InvalidArgument, "metric must be square");
  require(m.curv.rows() == n && m.curv.cols() == n, ErrorCode::InvalidArgument, "curvature must match the metric");
  require(m.g.allFinite() && m.curv.allFinite(), ErrorCode::InvalidArgument, "matrices must be finite");
  const double scale = std::max(1.0, m.g.norm());
  require((m.g - m.g.transpose()).norm() <= 1e-12 * scale, ErrorCode::InvalidArgument, "metric must be symmetric");
  require((m.curv + m.curv.transpose()).norm() <= 1e-12 * std::max(1.0, m.curv.norm()), ErrorCode::InvalidArgument,
          "curvature must be antisymmetric");
  require(min_eig(m.g) > 0.0, ErrorCode::InvalidArgument, "metric must be positive definite");
}

void validate(const WeylPair& p) {
  validate(p.plus);
  validate(p.minus);
  require(p.plus.n() == p.minus.n(), ErrorCode::InvalidArgument, "pair members must share the dimension");
}

MatrixXd d_matrix(const WeylModel& m, double t) {
  validate(m);
  require(std::isfinite(t) && t > 0.0, ErrorCode::InvalidArgument, "t must be positive");
  const Pencil p = pencil(m);
  const VectorXd f = (t * t * p.y).unaryExpr([](double v) { return num::xcoth_sq(v); }) / t;
  return symmetrize(p.g_half * p.V * f.asDiagonal() * p.V.transpose() * p.g_half);
}

double omega_single(const WeylModel& m, double t) {
  validate(m);
  require(std::isfinite(t) && t > 0.0, ErrorCode::InvalidArgument, "t must be positive");
  const Pencil p = pencil(m);
  double log_sigma = 0.0;
  for (double y : p.y) log_sigma += std::log(t) + num::log_sinhc_sq(t * t * y);
  return std::exp(0.5 * p.log_det_g - 0.5 * log_sigma);
}

cplx single_kernel(const WeylModel& m, double t, const VectorXd& x, const VectorXd& xp) {
  const MatrixXd D = d_matrix(m, t);
  const int n = m.n();
  require_point(x, n, "x");
  require_point(xp, n, "x'");
  const VectorXd u = xp - x;
  const double pref = std::pow(4.0 * std::numbers::pi, -0.5 * n) * omega_single(m, t);
  return pref * std::exp(-0.25 * u.dot(D * u) + 0.5 * I * x.dot(m.curv * xp));
}

PairMatrices pair_matrices(const WeylPair& p, double t, double s) {
  validate(p);
  require_times(t, s);
  const int n = p.plus.n();
  PairMatrices pm;
  pm.D_plus = d_matrix(p.plus, t);
  pm.D_minus = d_matrix(p.minus, s);
  pm.D = pm.D_plus + pm.D_minus;

  Eigen::LDLT<MatrixXd> ldlt(pm.D);
  const double scale = pm.D.norm();
  const double det_D = pm.D.determinant();
  require(ldlt.info() == Eigen::Success && det_D > 1e-14 * std::pow(scale / std::sqrt(n), n) && min_eig(pm.D) > 0.0,
          ErrorCode::SingularD, "D(t, s) is singular");
  const MatrixXcd Dinv = pm.D.inverse().cast<cplx>();

  pm.T_plus = pm.D_plus.cast<cplx>() + I * p.plus.curv.cast<cplx>();
  pm.T_minus = pm.D_minus.cast<cplx>() + I * p.minus.curv.cast<cplx>();
  pm.Z = (pm.D_plus - pm.D_minus).cast<cplx>() - 2.0 * I * p.minus.curv.cast<cplx>();
  pm.H = 0.25 * (pm.D.cast<cplx>() - pm.Z.transpose() * Dinv * pm.Z);
  pm.A_plus = pm.D_plus.cast<cplx>() - pm.T_plus * Dinv * pm.T_plus.transpose();
  pm.A_minus = pm.D_minus.cast<cplx>() - pm.T_minus.transpose() * Dinv * pm.T_minus;
  pm.B = pm.T_plus * Dinv * pm.T_minus;
  pm.Omega = omega_single(p.plus, t) * omega_single(p.minus, s) / std::sqrt(det_D);

  MatrixXd block(2 * n, 2 * n);
  block.topLeftCorner(n, n) = pm.A_plus.real();
  block.topRightCorner(n, n) = -pm.B.real();
  block.bottomLeftCorner(n, n) = -pm.B.real().transpose();
  block.bottomRightCorner(n, n) = pm.A_minus.real();
  pm.min_block = min_eig(block);
  pm.min_H = min_herm_eig(pm.H);

  const double tol = 1e-10 * std::max(1.0, block.norm());
  require(pm.min_block >= -tol, ErrorCode::KernelNotBounded,
          "closed convolution kernel is not a bounded Gaussian at these times");
  return pm;
}

cplx convolution_kernel(const PairMatrices& pm, const VectorXd& x, const VectorXd& xp) {
  const int n = static_cast<int>(pm.D.rows());
  require_point(x, n, "x");
  require_point(xp, n, "x'");
  const cplx expo = -0.25 * bilinear(x, pm.A_plus, x) - 0.25 * bilinear(xp, pm.A_minus, xp) + 0.5 * bilinear(x, pm.B, xp);
  return std::pow(4.0 * std::numbers::pi, -0.5 * n) * pm.Omega * std::exp(expo);
}

cplx convolution_kernel(const WeylPair& p, double t, double s, const VectorXd& x, const VectorXd& xp) {
  return convolution_kernel(pair_matrices(p, t, s), x, xp);
}

NumericConvolution numeric_convolution(const WeylPair& p, double t, double s, const VectorXd& x, const VectorXd& xp,
                                       double rel_tol) {
  validate(p);
  require_times(t, s);
  require(rel_tol >= 1e-14, ErrorCode::InvalidArgument, "rel_tol must be at least 1e-14");
  const int n = p.plus.n();
  require_point(x, n, "x");
  require_point(xp, n, "x'");

  // Whiten the Gaussian envelope |U+ U-| = exp(-(y - c)^T M (y - c) + const).
  const MatrixXd Dp = d_matrix(p.plus, t);
  const MatrixXd Dm = d_matrix(p.minus, s);
  const MatrixXd M = 0.25 * (Dp + Dm);
  const VectorXd c = (Dp + Dm).ldlt().solve(Dp * x + Dm * xp);
  Eigen::LLT<MatrixXd> llt(M);
  const MatrixXd Linv_t = MatrixXd(llt.matrixU()).inverse();  // y = c + U^{-1} z
  const double jac = Linv_t.determinant();

  auto evaluate = [&](int order) {
    const auto& rule = num::gauss_hermite(order);
    std::vector<int> idx(static_cast<size_t>(n), 0);
    VectorXd z(n);
    cplx sum{};
    cplx comp{};
    while (true) {
      double w = 1.0;
      for (int d = 0; d < n; ++d) {
        z(d) = rule.nodes[static_cast<size_t>(idx[static_cast<size_t>(d)])];
        w *= rule.weights[static_cast<size_t>(idx[static_cast<size_t>(d)])];
      }
      const VectorXd y = c + Linv_t * z;
      const cplx term = w * std::exp(z.squaredNorm()) * single_kernel(p.plus, t, x, y) * single_kernel(p.minus, s, y, xp);
      const cplx tt = sum + term;
      comp += (sum - tt) + term;
      sum = tt;
      int d = 0;
      while (d < n && ++idx[static_cast<size_t>(d)] == order) {
        idx[static_cast<size_t>(d)] = 0;
        ++d;
      }
      if (d == n) break;
    }
    return jac * (sum + comp);
  };

  const int max_order = n <= 2 ? 256 : (n == 3 ? 64 : 24);
  int order = 8;
  cplx prev = evaluate(order);
  while (true) {
    const int next = order * 2;
    if (next > max_order) break;
    const cplx cur = evaluate(next);
    const double err = std::abs(cur - prev);
    order = next;
    prev = cur;
    if (err <= rel_tol * std::abs(cur)) return {cur, err, order};
  }
  fail(ErrorCode::QuadratureFailure, "numeric convolution did not converge");
}

TraceDensity trace_density(const WeylPair& p, double t, double s, DensityMode mode) {
  const PairMatrices pm = pair_matrices(p, t, s);
  const int n = static_cast<int>(pm.D.rows());
  const double pref = std::pow(4.0 * std::numbers::pi, -0.5 * n);
  const MatrixXcd Q = pm.A_plus + pm.A_minus - pm.B - pm.B.transpose();
  const double scale = std::max(1.0, pm.D.norm());
  const bool integrable = min_eig(Q.real()) > 1e-10 * scale;

  if (mode == DensityMode::Integrated) {
    require(integrable, ErrorCode::NonIntegrableDiagonal, "kernel diagonal is not integrable");
  }
  if (mode == DensityMode::PerVolume || !integrable) {
    return {pref * pm.Omega, false};
  }
  // Complex symmetric Q with positive definite real part: eigenvalues lie in
  // the right half plane, the principal square roots give the continuous branch.
  Eigen::ComplexEigenSolver<MatrixXcd> es(0.25 * Q, false);
  cplx root{1.0, 0.0};
  for (const cplx& lam : es.eigenvalues()) root *= std::sqrt(lam);
  return {pref * pm.Omega * std::pow(std::numbers::pi, 0.5 * n) / root, true};
}

cplx translate(const WeylModel& m, const VectorXd& xi, const std::function<cplx(const VectorXd&)>& f,
               const VectorXd& x) {
  validate(m);
  require_point(xi, m.n(), "xi");
  require_point(x, m.n(), "x");
  // exp<xi, d - (i/2) R x> = exp(-(i/2) xi^T R x) shift_xi, since xi^T R xi = 0.
  return std::exp(-0.5 * I * xi.dot(m.curv * x)) * f(x + xi);
}

}  // namespace speclab
