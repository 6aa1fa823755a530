#include <doctest.h>

#include <cmath>
#include <random>

#include "check.hpp"
#include "oracles.hpp"
#include "speclab/nonlaplace.hpp"

using namespace speclab;

TEST_SUITE("nonlaplace") {
  TEST_CASE("leading density of a diagonal symbol") {
    for (int n : {1, 2, 3}) {
      Eigen::VectorXd h(3);
      h << 1.0, 2.0, 0.5;
      const auto sym = ConstantSymbol::diagonal(n, h, Eigen::MatrixXcd::Zero(3, 3));
      double ref = 0.0;
      for (int a = 0; a < 3; ++a) ref += std::pow(h(a), -0.5 * n);
      CHECK(check::rel(a0_density(sym).value, ref) < 1e-10);
    }
  }

  TEST_CASE("scalar metric density is det(g)^{1/2}") {
    Eigen::MatrixXd G(2, 2);
    G << 2.0, 0.5, 0.5, 1.0;
    const auto sym = ConstantSymbol::scalar(G, 2, Eigen::MatrixXcd::Zero(2, 2));
    CHECK(check::rel(a0_density(sym).value, 2.0 / std::sqrt(G.determinant())) < 1e-10);
  }

  TEST_CASE("potential term of a diagonal symbol") {
    Eigen::VectorXd h(2);
    h << 1.0, 3.0;
    Eigen::MatrixXcd Q(2, 2);
    Q << 0.7, 0.2, 0.2, -0.4;
    const auto sym = ConstantSymbol::diagonal(2, h, Q);
    const double ref = -(0.7 / 1.0 + (-0.4) / 3.0);
    CHECK(check::rel(a2_density(sym).value, ref) < 1e-9);
  }

  TEST_CASE("Volterra simplex integral against Simpson quadrature") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd A(3, 3), X(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        A(i, j) = {nd(rng), nd(rng)};
        X(i, j) = {nd(rng), nd(rng)};
      }
    }
    const Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    auto expm = [&](double s) {
      const Eigen::VectorXd e = (-s * es.eigenvalues().array()).exp();
      return Eigen::MatrixXcd(es.eigenvectors() * e.cast<std::complex<double>>().asDiagonal() *
                              es.eigenvectors().adjoint());
    };
    const int m = 2000;
    Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(3, 3);
    for (int k = 0; k <= m; ++k) {
      const double tau = static_cast<double>(k) / m;
      const double w = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      ref += w * expm(1.0 - tau) * X * expm(tau);
    }
    ref /= 3.0 * m;
    CHECK((volterra_simplex(H, X) - ref).norm() < 1e-10 * ref.norm());
  }

  TEST_CASE("Dirichlet boundary coefficient of a diagonal symbol") {
    Eigen::VectorXd h(2);
    h << 1.0, 4.0;
    const auto sym = ConstantSymbol::diagonal(2, h, Eigen::MatrixXcd::Zero(2, 2));
    const double ref = -0.5 * std::sqrt(oracle::pi) * (1.0 + 0.5);
    CHECK(check::rel(dirichlet_a1(sym).value, ref) < 1e-7);
  }

  TEST_CASE("Laplacian Dirichlet boundary coefficient") {
    const auto sym = ConstantSymbol::scalar(Eigen::MatrixXd::Identity(2, 2), 1, Eigen::MatrixXcd::Zero(1, 1));
    CHECK(check::rel(dirichlet_a1(sym).value, -0.5 * std::sqrt(oracle::pi)) < 1e-7);
  }

  TEST_CASE("Psi contour integral for a scalar symbol") {
    const auto sym = ConstantSymbol::scalar(Eigen::MatrixXd::Identity(2, 2), 1, Eigen::MatrixXcd::Zero(1, 1));
    const double xi[] = {1.0};
    const auto a = dirichlet_psi(sym, xi, {.t = 1.0});
    const auto b = dirichlet_psi(sym, xi, {.t = 0.25});
    CHECK(std::isfinite(a.value));
    CHECK(a.value != doctest::Approx(b.value));
  }

  TEST_CASE("indefinite symbols are not elliptic") {
    Eigen::VectorXd h(2);
    h << 1.0, -1.0;
    const auto sym = ConstantSymbol::diagonal(2, h, Eigen::MatrixXcd::Zero(2, 2));
    CHECK(check::code_of([&] { a0_density(sym); }) == ErrorCode::NotElliptic);
  }

  TEST_CASE("non-Hermitian blocks are rejected") {
    ConstantSymbol sym = ConstantSymbol::scalar(Eigen::MatrixXd::Identity(1, 1), 2, Eigen::MatrixXcd::Zero(2, 2));
    sym.a[0](0, 1) = {0.0, 1.0};
    CHECK(check::code_of([&] { validate(sym); }) == ErrorCode::InvalidArgument);
  }
}
