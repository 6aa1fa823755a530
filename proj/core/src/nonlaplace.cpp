#include "speclab/nonlaplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "speclab/errors.hpp"
#include "speclab/numerics.hpp"

namespace speclab {

namespace {

using CMat = Eigen::MatrixXcd;
using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kMeshStep = 0.05;

Eigen::VectorXd hermitian_eigs(const CMat& M) {
  const CMat S = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// (exp(-a) - exp(-b)) / (b - a), with the confluent limit by series.
double divided_exp(double a, double b) {
  const double d = b - a;
  if (std::abs(d) < 1e-6) {
    const double m = 0.5 * (a + b);
    return std::exp(-m) * (1.0 + d * d / 24.0 + d * d * d * d / 1920.0);
  }
  return (std::exp(-a) - std::exp(-b)) / d;
}

/// int dxi pi^{-n/2} F(xi) by tensor Gauss-Hermite after the scaling xi = sigma y,
/// doubling the order until successive results agree.
DensityResult gaussian_integral(int n, double sigma2, const std::function<double(std::span<const double>)>& F,
                                double rel_tol, double abs_tol) {
  const double sigma = std::sqrt(sigma2);
  const auto run = [&](int order) {
    std::vector<double> xi(n);
    const double v = num::gauss_hermite_tensor(n, order, [&](std::span<const double> y) {
      double r2 = 0.0;
      for (int k = 0; k < n; ++k) {
        xi[k] = sigma * y[k];
        r2 += y[k] * y[k];
      }
      return std::exp(r2) * F(xi);
    });
    return v * std::pow(sigma2 / kPi, 0.5 * n);
  };
  const int max_order = n >= 3 ? 96 : 256;
  int order = 8;
  double prev = run(order);
  while (order < max_order) {
    order = std::min(2 * order, max_order);
    const double cur = run(order);
    if (std::abs(cur - prev) <= std::max(rel_tol * std::abs(cur), abs_tol)) {
      return {cur, std::abs(cur - prev), order};
    }
    prev = cur;
  }
  fail(ErrorCode::QuadratureFailure, "Gauss-Hermite symbol integral did not converge");
}

/// Scaling that matches the weight to the slowest sampled Gaussian direction; faster
/// directions decay on top of it.
double slowest_sigma2(const SymbolBounds& b) { return 1.0 / b.hmin_sampled; }

}  // namespace

CMat ConstantSymbol::symbol(std::span<const double> xi) const {
  CMat H = CMat::Zero(N, N);
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) H += (xi[mu] * xi[nu]) * block(mu, nu);
  }
  return H;
}

ConstantSymbol ConstantSymbol::scalar(const Eigen::MatrixXd& g, int N, const CMat& Q) {
  ConstantSymbol s;
  s.n = static_cast<int>(g.rows());
  s.N = N;
  for (int mu = 0; mu < s.n; ++mu) {
    for (int nu = 0; nu < s.n; ++nu) s.a.push_back(g(mu, nu) * CMat::Identity(N, N));
  }
  s.Q = Q.size() ? Q : CMat::Zero(N, N);
  return s;
}

ConstantSymbol ConstantSymbol::diagonal(int n, const Eigen::VectorXd& h, const CMat& Q) {
  ConstantSymbol s;
  s.n = n;
  s.N = static_cast<int>(h.size());
  for (int mu = 0; mu < n; ++mu) {
    for (int nu = 0; nu < n; ++nu) {
      s.a.push_back(mu == nu ? CMat(h.cast<cplx>().asDiagonal()) : CMat::Zero(s.N, s.N));
    }
  }
  s.Q = Q.size() ? Q : CMat::Zero(s.N, s.N);
  return s;
}

void validate(const ConstantSymbol& s) {
  require(s.n >= 1 && s.N >= 1, ErrorCode::InvalidArgument, "need n >= 1 and N >= 1");
  require(s.a.size() == static_cast<size_t>(s.n * s.n), ErrorCode::InvalidArgument, "need n^2 symbol blocks");
  for (int mu = 0; mu < s.n; ++mu) {
    for (int nu = 0; nu < s.n; ++nu) {
      const auto& A = s.block(mu, nu);
      require(A.rows() == s.N && A.cols() == s.N, ErrorCode::InvalidArgument, "symbol blocks must be N x N");
      require((A - s.block(nu, mu)).norm() <= 1e-12 * std::max(1.0, A.norm()), ErrorCode::InvalidArgument,
              "a^{mu nu} must equal a^{nu mu}");
      require((A - A.adjoint()).norm() <= 1e-12 * std::max(1.0, A.norm()), ErrorCode::InvalidArgument,
              "symbol blocks must be self-adjoint");
    }
  }
  require(s.Q.rows() == s.N && s.Q.cols() == s.N, ErrorCode::InvalidArgument, "Q must be N x N");
  require((s.Q - s.Q.adjoint()).norm() <= 1e-12 * std::max(1.0, s.Q.norm()), ErrorCode::InvalidArgument,
          "Q must be self-adjoint");
}

SymbolBounds certify_symbol(const ConstantSymbol& s) {
  validate(s);
  const auto q = num::quadratic_form_bounds(
      s.n, [&](std::span<const double> xi) { return hermitian_eigs(s.symbol(xi)); },
      [](const num::QuadraticFormBounds& b) { return b.min_sampled > b.margin; }, kMeshStep);
  if (!(q.min_sampled > q.margin)) {
    fail(ErrorCode::NotElliptic, "leading symbol not certified positive: sampled minimum " +
                                     std::to_string(q.min_sampled) + " vs margin " + std::to_string(q.margin));
  }
  return {q.min_sampled - q.margin, q.max_sampled, q.min_sampled};
}

CMat volterra_simplex(const CMat& H, const CMat& X) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H + H.adjoint()));
  const CMat& V = es.eigenvectors();
  const auto& h = es.eigenvalues();
  CMat Y = V.adjoint() * X * V;
  for (int i = 0; i < Y.rows(); ++i) {
    for (int j = 0; j < Y.cols(); ++j) Y(i, j) *= divided_exp(h(i), h(j));
  }
  return V * Y * V.adjoint();
}

DensityResult a0_density(const ConstantSymbol& sym, double rel_tol) {
  const auto b = certify_symbol(sym);
  return gaussian_integral(
      sym.n, slowest_sigma2(b),
      [&](std::span<const double> xi) {
        const auto e = hermitian_eigs(sym.symbol(xi));
        double tr = 0.0;
        for (int k = 0; k < e.size(); ++k) tr += std::exp(-e(k));
        return tr;
      },
      rel_tol, 1e-300);
}

DensityResult a2_density(const ConstantSymbol& sym, double rel_tol) {
  const auto b = certify_symbol(sym);
  const double scale = std::max(1e-300, sym.Q.norm());
  auto r = gaussian_integral(
      sym.n, slowest_sigma2(b),
      [&](std::span<const double> xi) { return volterra_simplex(sym.symbol(xi), sym.Q).trace().real(); }, rel_tol,
      1e-15 * scale);
  r.value = -r.value;
  return r;
}

DensityResult a1_volterra(const ConstantSymbol& sym, const std::vector<CMat>& k, double abs_tol) {
  require(static_cast<int>(k.size()) == sym.n, ErrorCode::InvalidArgument, "need one K matrix per direction");
  const auto b = certify_symbol(sym);
  auto r = gaussian_integral(
      sym.n, slowest_sigma2(b),
      [&](std::span<const double> xi) {
        CMat K = CMat::Zero(sym.N, sym.N);
        for (int mu = 0; mu < sym.n; ++mu) K += xi[mu] * k[mu];
        return volterra_simplex(sym.symbol(xi), K).trace().real();
      },
      0.0, abs_tol);
  r.value = -r.value;
  return r;
}

CMat dirichlet_phi(const ConstantSymbol& sym, std::span<const double> xi_hat, cplx lambda) {
  const int n = sym.n;
  const int N = sym.N;
  require(static_cast<int>(xi_hat.size()) == n - 1, ErrorCode::InvalidArgument, "xi_hat needs n - 1 components");
  const int nn = n - 1;
  // H(omega) = A omega^2 + B omega + C in the normal variable.
  const CMat& A = sym.block(nn, nn);
  CMat B = CMat::Zero(N, N);
  CMat C = CMat::Zero(N, N);
  for (int i = 0; i < nn; ++i) {
    B += xi_hat[i] * (sym.block(nn, i) + sym.block(i, nn));
    for (int j = 0; j < nn; ++j) C += (xi_hat[i] * xi_hat[j]) * sym.block(i, j);
  }
  Eigen::SelfAdjointEigenSolver<CMat> ea(0.5 * (A + A.adjoint()));
  require(ea.eigenvalues().minCoeff() > 0.0, ErrorCode::NotElliptic, "normal block a^{nn} must be positive");
  const CMat Aih = ea.operatorInverseSqrt();
  const CMat Bt = Aih * B * Aih;
  const CMat Ct = Aih * (C - lambda * CMat::Identity(N, N)) * Aih;
  // Companion linearization of omega^2 + Bt omega + Ct.
  CMat comp = CMat::Zero(2 * N, 2 * N);
  comp.topRightCorner(N, N).setIdentity();
  comp.bottomLeftCorner(N, N) = -Ct;
  comp.bottomRightCorner(N, N) = -Bt;
  Eigen::ComplexEigenSolver<CMat> es(comp);
  require(es.info() == Eigen::Success, ErrorCode::QuadratureFailure, "companion eigensolver failed");
  const CMat& V = es.eigenvectors();
  const CMat W = V.inverse();
  CMat sum = CMat::Zero(N, N);
  for (int j = 0; j < 2 * N; ++j) {
    const double im = es.eigenvalues()(j).imag();
    require(im != 0.0, ErrorCode::InvalidArgument, "lambda lies on the spectrum of H(., xi_hat)");
    const double sgn = im > 0.0 ? 1.0 : -1.0;
    sum += sgn * (V.col(j).head(N) * W.row(j).tail(N));
  }
  return Aih * (cplx(0.0, 0.5) * sum) * Aih;
}

DensityResult dirichlet_psi(const ConstantSymbol& sym, std::span<const double> xi_hat, const PsiOptions& opt) {
  require(opt.t > 0.0, ErrorCode::InvalidArgument, "t must be positive");
  const auto b = certify_symbol(sym);
  double xi2 = 0.0;
  for (double x : xi_hat) xi2 += x * x;
  // The cut of Phi lies in [cut, inf); the parabola lambda(y) = c + y^2 + 2 i w y passes to its left.
  const double cut = b.hmin * xi2;
  const double c = cut - 1.0;
  constexpr double w = 1.0;
  const int N = sym.N;
  const auto dlogdet = [&](cplx lambda) {
    const double dist = lambda.real() <= cut ? std::abs(lambda - cut) : std::abs(lambda.imag());
    const double r = 0.1 * dist;
    constexpr int K = 16;
    CMat dphi = CMat::Zero(N, N);
    for (int k = 0; k < K; ++k) {
      const cplx e = std::polar(1.0, 2.0 * kPi * (k + 0.5) / K);
      dphi += dirichlet_phi(sym, xi_hat, lambda + r * e) * std::conj(e);
    }
    dphi /= (K * r);
    const CMat phi = dirichlet_phi(sym, xi_hat, lambda);
    return phi.partialPivLu().solve(dphi).trace();
  };
  // Tail bound beyond |y| = Y: |lambda'| |exp(-t lambda)| |dlogdet| <= 2(y+w) e^{-t(c+y^2)} N/dist, dist >= 1.
  const auto tail = [&](double Y) { return N * std::exp(-opt.t * (c + Y * Y)) * (1.0 + w / Y) / opt.t; };
  double Y = opt.contour_half_length;
  if (!(Y > 0.0)) {
    Y = 1.0;
    while (tail(Y) > opt.tail_tol && Y < 1e6) Y *= 1.25;
  }
  if (tail(Y) > opt.tail_tol) {
    fail(ErrorCode::ContourTooShort, "contour half length " + std::to_string(Y) + " leaves tail " +
                                         std::to_string(tail(Y)));
  }
  const auto f = [&](double y) {
    const cplx lambda(c + y * y, 2.0 * w * y);
    const cplx dl(2.0 * y, 2.0 * w);
    return dl * std::exp(-opt.t * lambda) * dlogdet(lambda) / cplx(0.0, 2.0 * kPi);
  };
  const auto est = num::integrate(std::function<cplx(double)>(f), -Y, Y, opt.rel_tol, 1e-14);
  return {est.value.real(), est.error + std::abs(est.value.imag()) + tail(Y), 0};
}

DensityResult dirichlet_a1(const ConstantSymbol& sym, double rel_tol) {
  const int d = sym.n - 1;
  constexpr double sqrt_pi = 1.7724538509055160273;
  if (d == 0) {
    const auto psi = dirichlet_psi(sym, {});
    return {-sqrt_pi * psi.value, sqrt_pi * psi.error, 0};
  }
  const auto b = certify_symbol(sym);
  double psi_err = 0.0;
  auto r = gaussian_integral(
      d, slowest_sigma2(b),
      [&](std::span<const double> xi) {
        const auto p = dirichlet_psi(sym, xi);
        psi_err = std::max(psi_err, p.error);
        return p.value;
      },
      rel_tol, 1e-14);
  r.value *= -sqrt_pi;
  r.error = sqrt_pi * (r.error + psi_err * sym.N);
  return r;
}

}  // namespace speclab
