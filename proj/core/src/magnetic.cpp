#include "speclab/magnetic.hpp"

#include <cmath>
#include <numbers>

#include "speclab/errors.hpp"
#include "speclab/models.hpp"
#include "speclab/numerics.hpp"

namespace speclab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void require_time(double t) {
  require(std::isfinite(t) && t > 0.0, ErrorCode::InvalidArgument, "t must be positive");
}

// F^T F = V diag(y) V^T; even functions of tiF are functions of t^2 y.
struct Squares {
  VectorXd y;
  MatrixXd V;
};

Squares squares(const MatrixXd& F) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(F.transpose() * F);
  return {es.eigenvalues().cwiseMax(0.0), es.eigenvectors()};
}

}  // namespace

void validate(const MagneticModel& m) {
  const auto n = m.F.rows();
  require(n >= 2 && n % 2 == 0 && m.F.cols() == n, ErrorCode::InvalidArgument, "F must be square of even size");
  require(m.F.allFinite(), ErrorCode::InvalidArgument, "F must be finite");
  require((m.F + m.F.transpose()).norm() <= 1e-12 * std::max(1.0, m.F.norm()), ErrorCode::InvalidArgument,
          "F must be antisymmetric");
  if (m.bundle_curv.empty()) return;
  require(m.bundle_curv.size() == static_cast<size_t>(n * n), ErrorCode::InvalidArgument,
          "bundle curvature needs n*n blocks");
  const auto N = m.bundle_curv.front().rows();
  for (Eigen::Index mu = 0; mu < n; ++mu) {
    for (Eigen::Index nu = 0; nu < n; ++nu) {
      const auto& a = m.bundle_curv[static_cast<size_t>(mu * n + nu)];
      const auto& b = m.bundle_curv[static_cast<size_t>(nu * n + mu)];
      require(a.rows() == N && a.cols() == N && a.allFinite(), ErrorCode::InvalidArgument,
              "bundle curvature blocks must be finite N x N");
      require((a + b).norm() <= 1e-12 * std::max(1.0, a.norm()), ErrorCode::InvalidArgument,
              "bundle curvature must be antisymmetric in mu, nu");
    }
  }
}

double u0_kernel(const MagneticModel& m, double t, const VectorXd& x, const VectorXd& xp) {
  validate(m);
  require_time(t);
  const int n = m.n();
  require(x.size() == n && xp.size() == n && x.allFinite() && xp.allFinite(), ErrorCode::InvalidArgument,
          "points must be finite with dimension n");
  const Squares sq = squares(m.F);
  double log_det = 0.0;
  VectorXd coth(n);
  for (int i = 0; i < n; ++i) {
    const double y = t * t * sq.y(i);
    log_det -= num::log_sinhc_sq(y);
    coth(i) = num::xcoth_sq(y);
  }
  const VectorXd w = sq.V.transpose() * (x - xp);
  const double quad = w.dot(coth.cwiseProduct(w));
  return std::pow(4.0 * std::numbers::pi * t, -0.5 * n) * std::exp(0.5 * log_det - quad / (4.0 * t));
}

MatrixXd h_tensor(const MagneticModel& m, double t) {
  validate(m);
  require(std::isfinite(t) && t >= 0.0, ErrorCode::InvalidArgument, "t must be non-negative");
  if (t == 0.0) return MatrixXd::Zero(m.n(), m.n());
  const Squares sq = squares(m.F);
  const VectorXd f = (t * t * sq.y).unaryExpr([](double y) { return num::coth_odd_sq(y); });
  const MatrixXd h = t * m.F * sq.V * f.asDiagonal() * sq.V.transpose();
  return 0.5 * (h - h.transpose());
}

LandauCheck landau_check(double B, double t) {
  require(std::isfinite(B) && B > 0.0, ErrorCode::InvalidArgument, "B must be positive");
  require_time(t);
  const double x = t * B;
  LandauCheck out;
  out.diagonal = B / (4.0 * std::numbers::pi * std::sinh(x));

  // Levels until the next term is below 1e-18 of the first, at most 4096.
  const int K = static_cast<int>(std::min(4096.0, std::ceil(21.0 / x)));
  const Spectrum levels = eigenvalues(Landau{B, 0.0}, B * (2.0 * K + 1.0));
  num::CompensatedSum sum;
  for (const auto& e : levels.entries) sum.add(e.multiplicity * std::exp(-t * e.lambda));
  const int last = static_cast<int>(levels.entries.size()) - 1;
  const double tail = B / (2.0 * std::numbers::pi) * std::exp(-x * (2.0 * last + 3.0)) / -std::expm1(-2.0 * x);
  sum.add(tail);
  out.level_sum = sum.value();
  out.levels = last + 1;
  out.difference = std::abs(out.level_sum - out.diagonal) / out.diagonal;
  return out;
}

Eigen::MatrixXcd b2_leading(const MagneticModel& m, double scalar_curvature, double t) {
  validate(m);
  require(std::isfinite(scalar_curvature), ErrorCode::InvalidArgument, "scalar curvature must be finite");
  require(std::isfinite(t) && t >= 0.0, ErrorCode::InvalidArgument, "t must be non-negative");
  const int N = m.N();
  if (t == 0.0) return Eigen::MatrixXcd::Identity(N, N) * (scalar_curvature / 6.0);
  require(scalar_curvature == 0.0, ErrorCode::CurvedScopeUnsupported,
          "b2 at t > 0 is available on flat base manifolds only");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
  if (m.bundle_curv.empty()) return out;
  const MatrixXd h = h_tensor(m, t);
  const int n = m.n();
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) out += h(mu, nu) * m.bundle_curv[static_cast<size_t>(mu * n + nu)];
  }
  return std::complex<double>(0.0, 0.5) * out;
}

}  // namespace speclab
