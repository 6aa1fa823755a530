#include <doctest.h>

#include <cmath>

#include "check.hpp"
#include "oracles.hpp"
#include "speclab/magnetic.hpp"

using namespace speclab;

namespace {

MagneticModel planar(double B) {
  MagneticModel m;
  m.F = Eigen::MatrixXd::Zero(2, 2);
  m.F(0, 1) = B;
  m.F(1, 0) = -B;
  return m;
}

}  // namespace

TEST_SUITE("magnetic") {
  TEST_CASE("diagonal kernel equals the Landau level sum") {
    for (double B : {0.1, 1.0, 3.0}) {
      for (double t : {0.05, 1.0, 4.0}) {
        const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
        CHECK(check::rel(u0_kernel(planar(B), t, x, x), oracle::landau_levels(B, t)) < 1e-12);
        CHECK(landau_check(B, t).difference < 1e-12);
      }
    }
  }

  TEST_CASE("off-diagonal Gaussian width") {
    const double B = 1.3, t = 0.7;
    Eigen::VectorXd x(2), xp(2);
    x << 0.4, -0.2;
    xp << -0.1, 0.5;
    const double u2 = (x - xp).squaredNorm();
    const double ref = B / (4.0 * oracle::pi * std::sinh(t * B)) * std::exp(-B / std::tanh(t * B) * u2 / 4.0);
    CHECK(check::rel(u0_kernel(planar(B), t, x, xp), ref) < 1e-13);
  }

  TEST_CASE("zero field gives the free kernel") {
    MagneticModel m;
    m.F = Eigen::MatrixXd::Zero(4, 4);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4), xp = Eigen::VectorXd::Constant(4, 0.3);
    const double t = 0.5;
    const double ref = std::pow(4.0 * oracle::pi * t, -2.0) * std::exp(-xp.squaredNorm() / (4.0 * t));
    CHECK(check::rel(u0_kernel(m, t, x, xp), ref) < 1e-14);
  }

  TEST_CASE("h tensor is antisymmetric and linear at small t") {
    const auto m = planar(2.0);
    const Eigen::MatrixXd h = h_tensor(m, 1.0);
    CHECK((h + h.transpose()).norm() < 1e-15);
    CHECK(std::abs(h(0, 1)) == doctest::Approx(1.0 / std::tanh(2.0) - 0.5).epsilon(1e-13));
    const Eigen::MatrixXd hs = h_tensor(m, 1e-6);
    CHECK((hs - 1e-6 * m.F / 3.0).norm() < 1e-15);
  }

  TEST_CASE("leading b2 contraction") {
    auto m = planar(1.0);
    m.bundle_curv.assign(4, Eigen::MatrixXcd::Zero(1, 1));
    m.bundle_curv[1](0, 0) = {0.0, 1.0};
    m.bundle_curv[2](0, 0) = {0.0, -1.0};
    const auto b2 = b2_leading(m, 0.0, 1.0);
    CHECK(std::abs(b2(0, 0).real()) == doctest::Approx(1.0 / std::tanh(1.0) - 1.0).epsilon(1e-12));
    CHECK(std::abs(b2(0, 0).imag()) < 1e-15);
    const auto b0 = b2_leading(m, 0.0, 0.0);
    CHECK(std::abs(b0(0, 0)) < 1e-15);
  }

  TEST_CASE("invalid fields") {
    MagneticModel odd;
    odd.F = Eigen::MatrixXd::Zero(3, 3);
    CHECK(check::code_of([&] { validate(odd); }) == ErrorCode::InvalidArgument);
    MagneticModel sym = planar(1.0);
    sym.F(1, 0) = 1.0;
    CHECK(check::code_of([&] { validate(sym); }) == ErrorCode::InvalidArgument);
    CHECK(check::code_of([&] { b2_leading(planar(1.0), 1.0, 1.0); }) == ErrorCode::CurvedScopeUnsupported);
  }
}
