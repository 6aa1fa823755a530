#include <doctest.h>

#include <cmath>

#include "check.hpp"
#include "oracles.hpp"
#include "speclab/heatdet.hpp"

using namespace speclab;

namespace {

// (1/2) sum over l1, l2, k1 of w(k1) w(l1 + l2 - k1) w(l1) w(l2) det(l1, l2)^2 (2 pi / vol)^4 on the square torus.
double brute_torus(double t, int K) {
  const double vol = 4.0 * oracle::pi * oracle::pi;
  const double norm = std::pow(2.0 * oracle::pi / vol, 4);
  auto w = [&](int a, int b) { return std::exp(-t * (a * a + b * b)); };
  long double sum = 0;
  for (int a1 = -K; a1 <= K; ++a1)
    for (int b1 = -K; b1 <= K; ++b1)
      for (int a2 = -K; a2 <= K; ++a2)
        for (int b2 = -K; b2 <= K; ++b2) {
          const double d = a1 * b2 - b1 * a2;
          if (d == 0.0) continue;
          long double inner = 0;
          for (int c1 = -2 * K; c1 <= 2 * K; ++c1)
            for (int e1 = -2 * K; e1 <= 2 * K; ++e1) inner += w(c1, e1) * w(a1 + a2 - c1, b1 + b2 - e1);
          sum += 0.5L * norm * d * d * w(a1, b1) * w(a2, b2) * inner;
        }
  return static_cast<double>(sum);
}

}  // namespace

TEST_SUITE("heatdet") {
  const ModelOperator circle = Circle{1.0, 0.0, 0.0};

  TEST_CASE("circle heat determinant against the mode sum") {
    for (double t : {1e-3, 0.1, 1.0, 3.0}) {
      CHECK(check::rel(heat_det(circle, t).value, oracle::circle_heat_det(t)) < 1e-12);
    }
    CHECK(heat_det(circle, 1.0).value == doctest::Approx(0.27335454163648615).epsilon(1e-14));
    CHECK(check::rel(heat_det(Circle{2.0, 0.0, 0.0}, 0.5).value, oracle::circle_heat_det(0.5, 2.0)) < 1e-12);
  }

  TEST_CASE("defining integral equals the spectral sum") {
    for (double t : {0.01, 0.5, 2.0}) {
      CHECK(check::rel(heat_det_defining(circle, t).value, heat_det(circle, t).value) < 1e-10);
    }
    CHECK(check::code_of([] { heat_det_defining(Circle{1.0, 0.3, 0.0}, 1.0); }) == ErrorCode::UnsupportedModel);
  }

  TEST_CASE("two-torus heat determinant against a brute-force sum") {
    const ModelOperator torus = FlatTorus{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 0.0};
    CHECK(check::rel(heat_det(torus, 2.0).value, brute_torus(2.0, 4)) < 1e-10);
  }

  TEST_CASE("leading behaviour and order") {
    CHECK(heat_det_order(1) == 1.5);
    CHECK(heat_det_order(2) == 5.0);
    const double lead = heat_det_leading(1, 1, 2.0 * oracle::pi);
    CHECK(lead == doctest::Approx(0.5 / (4.0 * oracle::pi) * std::sqrt(oracle::pi / 2.0) * 2.0 * oracle::pi));
    const auto fit = heat_det_fit(circle, {1e-3, 1.5e-3, 2e-3, 3e-3, 5e-3, 7e-3, 1e-2});
    CHECK(check::rel(fit.coefficient(0.0), lead) < 1e-8);
  }

  TEST_CASE("circle correlators") {
    const auto c = correlators(circle, 3);
    CHECK(c.size() == 6);
    for (const auto& e : c) {
      CHECK(e.k[0] == e.l[0]);
      CHECK(e.value.imag() == doctest::Approx(e.l[0](0)));
    }
    const std::vector<Eigen::VectorXi> k{Eigen::VectorXi::Constant(1, 1)}, l{Eigen::VectorXi::Constant(1, 2)};
    CHECK(correlator(circle, k, l) == std::complex<double>{});
  }

  TEST_CASE("two-torus correlators conserve momentum and are antisymmetric") {
    const ModelOperator torus = FlatTorus{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 0.0};
    for (const auto& e : correlators(torus, 1)) {
      CHECK((e.k[0] + e.k[1] - e.l[0] - e.l[1]).isZero());
      const std::vector<Eigen::VectorXi> swapped{e.l[1], e.l[0]};
      CHECK(correlator(torus, e.k, swapped) == -e.value);
    }
  }

  TEST_CASE("budget and model checks") {
    const ModelOperator torus = FlatTorus{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 0.0};
    CHECK(check::code_of([&] { heat_det(torus, 1e-3, 1000); }) == ErrorCode::TailTooLarge);
    CHECK(check::code_of([] { heat_det(Sphere2{1.0}, 1.0); }) == ErrorCode::UnsupportedModel);
    CHECK(check::code_of([&] { heat_det(circle, -1.0); }) == ErrorCode::InvalidArgument);
  }
}
