#include "speclab_cli/instances.hpp"

#include <cmath>
#include <random>

#include "speclab/errors.hpp"

namespace speclab::cli {

namespace {

using CMat = Eigen::MatrixXcd;
using Eigen::MatrixXd;

CMat random_unitary(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CMat Z(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) Z(i, j) = {gauss(rng), gauss(rng)};
  }
  Eigen::HouseholderQR<CMat> qr(Z);
  return qr.householderQ() * CMat::Identity(N, N);
}

MatrixXd random_spd(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  MatrixXd A(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) A(i, j) = u(rng);
  }
  return MatrixXd::Identity(d, d) + 0.5 * (A + A.transpose()) * 0.5 + A * A.transpose() * 0.25;
}

/// Gamma_j from whitened G_a = sum_j half(j, a) Gamma_j.
std::vector<CMat> unwhiten(const std::vector<CMat>& whitened, const MatrixXd& metric) {
  const int d = static_cast<int>(whitened.size());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(metric);
  const MatrixXd inv_half = es.operatorInverseSqrt();
  std::vector<CMat> out;
  for (int j = 0; j < d; ++j) {
    CMat G = CMat::Zero(whitened.front().rows(), whitened.front().cols());
    for (int a = 0; a < d; ++a) G += inv_half(j, a) * whitened[static_cast<size_t>(a)];
    out.push_back(0.5 * (G - G.adjoint()));
  }
  return out;
}

}  // namespace

MatrixXd symplectic(int n, double b) {
  MatrixXd R = MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; i += 2) {
    R(i, i + 1) = b;
    R(i + 1, i) = -b;
  }
  return R;
}

ObliqueSymbol random_commuting_symbol(int n, int N, std::uint64_t seed) {
  require(n >= 1 && N >= 1, ErrorCode::InvalidArgument, "n and N must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int d = n - 1;
  ObliqueSymbol sym;
  sym.n = n;
  const CMat U = random_unitary(N, rng);
  std::vector<CMat> whitened(static_cast<size_t>(d), CMat::Zero(N, N));
  for (int k = 0; k < N; ++k) {
    Eigen::VectorXd dk(d);
    for (int a = 0; a < d; ++a) dk(a) = u(rng);
    if (d > 0 && dk.norm() > 0.0) dk *= std::sqrt(0.8) * std::abs(u(rng)) / dk.norm();
    for (int a = 0; a < d; ++a) whitened[static_cast<size_t>(a)](k, k) = {0.0, dk(a)};
  }
  for (auto& G : whitened) G = U * G * U.adjoint();
  sym.boundary_metric = d > 0 ? random_spd(d, rng) : MatrixXd(0, 0);
  sym.gammas = d > 0 ? unwhiten(whitened, sym.boundary_metric) : std::vector<CMat>{};

  const CMat V = random_unitary(N, rng);
  std::uniform_int_distribution<int> rank(0, N);
  const int r = rank(rng);
  CMat P = CMat::Zero(N, N);
  for (int k = 0; k < r; ++k) P(k, k) = 1.0;
  sym.Pi = V * P * V.adjoint();
  sym.Pi = 0.5 * (sym.Pi + sym.Pi.adjoint()).eval();
  return sym;
}

ObliqueSymbol random_clifford_symbol(int n, int N, double kappa, std::uint64_t seed) {
  const int d = n - 1;
  require(n >= 1 && n <= 4 && N >= 1, ErrorCode::InvalidArgument, "Clifford instances need 1 <= n <= 4");
  require(d == 0 || N >= 2, ErrorCode::InvalidArgument, "Clifford instances with n >= 2 need N >= 2");
  require(kappa >= 0.0 && kappa < 1.0, ErrorCode::InvalidArgument, "kappa must lie in [0, 1)");
  std::mt19937_64 rng(seed);
  using C = std::complex<double>;
  const C I{0.0, 1.0};
  CMat sigma[3] = {CMat(2, 2), CMat(2, 2), CMat(2, 2)};
  sigma[0] << 0.0, 1.0, 1.0, 0.0;
  sigma[1] << 0.0, -I, I, 0.0;
  sigma[2] << 1.0, 0.0, 0.0, -1.0;

  const int pairs = N / 2;
  CMat P = CMat::Zero(N, N);
  for (int k = 0; k < 2 * pairs; ++k) P(k, k) = 1.0;
  const CMat U = random_unitary(N, rng);

  ObliqueSymbol sym;
  sym.n = n;
  std::vector<CMat> whitened;
  for (int a = 0; a < d; ++a) {
    CMat G = CMat::Zero(N, N);
    for (int p = 0; p < pairs; ++p) G.block(2 * p, 2 * p, 2, 2) = I * std::sqrt(kappa) * sigma[a];
    whitened.push_back(U * G * U.adjoint());
  }
  sym.Pi = U * P * U.adjoint();
  sym.Pi = 0.5 * (sym.Pi + sym.Pi.adjoint()).eval();
  sym.boundary_metric = d > 0 ? random_spd(d, rng) : MatrixXd(0, 0);
  sym.gammas = d > 0 ? unwhiten(whitened, sym.boundary_metric) : std::vector<CMat>{};
  return sym;
}

WeylPair random_weyl_pair(int n, std::uint64_t seed, double curvature_scale) {
  require(n >= 1, ErrorCode::InvalidArgument, "n must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto model = [&]() {
    WeylModel m;
    m.g = random_spd(n, rng);
    MatrixXd A(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = u(rng);
    }
    m.curv = curvature_scale * 0.5 * (A - A.transpose());
    return m;
  };
  WeylPair p;
  p.plus = model();
  p.minus = model();
  return p;
}

}  // namespace speclab::cli
