#include <doctest.h>

#include <cmath>

#include "check.hpp"
#include "oracles.hpp"
#include "speclab/relative.hpp"

using namespace speclab;

namespace {

double brute_X(double rp, double rm, double t, double s) {
  long double sum = 0;
  for (int k = -4000; k <= 4000; ++k) {
    const long double q2 = static_cast<long double>(k) * k;
    sum += std::exp(-t * q2 / (rp * rp) - s * q2 / (rm * rm));
  }
  return static_cast<double>(sum);
}

double brute_Y(double ep, double em, double theta, double t, double s) {
  long double sum = 0;
  for (int k = -4000; k <= 4000; ++k) {
    const long double p = ep * (k + theta), m = em * (k + theta);
    sum += p * m * std::exp(-t * p * p - s * m * m);
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_SUITE("relative") {
  const TracePair circles{Circle{1.0, 0.0, 0.0}, Circle{1.5, 0.0, 0.0}, 0.0};
  const TracePair diracs{DiracCircle{1.0, 0.2}, DiracCircle{1.4, 0.2}, 0.0};

  TEST_CASE("combined trace X of two circles") {
    for (double t : {0.01, 0.3, 1.0}) {
      for (double s : {0.02, 0.5}) {
        CHECK(check::rel(combined_trace_X(circles, t, s).value, brute_X(1.0, 1.5, t, s)) < 1e-12);
      }
    }
  }

  TEST_CASE("combined trace Y of two Dirac circles") {
    for (double t : {0.05, 0.5}) {
      for (double s : {0.1, 1.0}) {
        CHECK(check::rel(combined_trace_Y(diracs, t, s).value, brute_Y(1.0, 1.4, 0.2, t, s)) < 1e-11);
      }
    }
  }

  TEST_CASE("relative invariants expand into combined traces") {
    const double t = 0.3, s = 0.7;
    const double ref = brute_X(1.0, 1.0, t, s) - brute_X(1.0, 1.5, t, s) - brute_X(1.5, 1.0, t, s) +
                       brute_X(1.5, 1.5, t, s);
    CHECK(check::rel(relative_psi(circles, t, s).value, ref) < 1e-10);
    const double phi = brute_Y(1.0, 1.0, 0.2, t, s) - brute_Y(1.0, 1.4, 0.2, t, s) - brute_Y(1.4, 1.0, 0.2, t, s) +
                       brute_Y(1.4, 1.4, 0.2, t, s);
    CHECK(check::rel(relative_phi(diracs, t, s).value, phi) < 1e-10);
  }

  TEST_CASE("relative invariant of equal operators vanishes") {
    const TracePair same{Circle{1.0, 0.1, 0.0}, Circle{1.0, 0.1, 0.0}, 0.0};
    CHECK(std::abs(relative_psi(same, 0.2, 0.4).value) < 1e-12);
  }

  TEST_CASE("leading coefficients of the combined traces") {
    const auto fx = theorem1_leading_fit(circles, 1.0, 1.0, {1e-3, 1.5e-3, 2e-3, 3e-3, 5e-3, 7e-3, 1e-2});
    CHECK(check::rel(fx.fitted, fx.predicted) < 1e-6);
    // vol N det g^{1/2} with g = (1 + 1/1.5^2)^{-1}.
    CHECK(fx.predicted == doctest::Approx(2.0 * oracle::pi / std::sqrt(1.0 + 1.0 / 2.25)));
    const auto fy = theorem1_leading_fit(diracs, 1.0, 1.0, {1e-3, 1.5e-3, 2e-3, 3e-3, 5e-3, 7e-3, 1e-2},
                                         CombinedTrace::Y);
    CHECK(check::rel(fy.fitted, fy.predicted) < 1e-6);
  }

  TEST_CASE("effective metric inverts the weighted inverse metrics") {
    const Eigen::MatrixXd g = effective_metric(circles, 2.0, 3.0);
    CHECK(g(0, 0) == doctest::Approx(1.0 / (2.0 + 3.0 / 2.25)));
  }

  TEST_CASE("bosonic Bogolyubov invariant: spectral, kernel, brute force") {
    const TracePair massive{Circle{1.0, 0.0, 0.0}, Circle{1.3, 0.0, 0.0}, 0.8};
    for (double beta : {0.5, 1.0, 2.0}) {
      const double ref = oracle::circle_bogolyubov_bose(beta, 1.0, 1.3, 0.8);
      const auto sp = bogolyubov(massive, beta, Statistics::Bose, BogolyubovMethod::Spectral);
      const auto ke = bogolyubov(massive, beta, Statistics::Bose, BogolyubovMethod::Kernel);
      CHECK(check::rel(sp.value, ref) < 1e-11);
      CHECK(check::rel(ke.value, ref) < 1e-8);
    }
  }

  TEST_CASE("fermionic Bogolyubov invariant agrees across methods") {
    const TracePair massive{DiracCircle{1.0, 0.5}, DiracCircle{1.2, 0.5}, 0.6};
    const auto sp = bogolyubov(massive, 1.0, Statistics::Fermi, BogolyubovMethod::Spectral);
    const auto ke = bogolyubov(massive, 1.0, Statistics::Fermi, BogolyubovMethod::Kernel);
    CHECK(check::rel(sp.value, ke.value) < 1e-8);
  }

  TEST_CASE("exponent fit is finite with a small residual") {
    const TracePair massive{Circle{1.0, 0.0, 0.0}, Circle{1.3, 0.0, 0.0}, 0.8};
    const auto f = bogolyubov_exponent_fit(massive, {0.05, 0.07, 0.1, 0.14, 0.2, 0.28, 0.4}, Statistics::Bose);
    CHECK(std::isfinite(f.exponent));
    CHECK(f.residual < 1e-3);
  }

  TEST_CASE("pair preconditions") {
    const TracePair twisted{Circle{1.0, 0.1, 0.0}, Circle{1.0, 0.2, 0.0}, 0.0};
    CHECK(check::code_of([&] { validate(twisted); }) == ErrorCode::NonCommutingPair);
    const TracePair mixed{Circle{1.0, 0.0, 0.0}, DiracCircle{1.0, 0.0}, 0.0};
    CHECK(check::code_of([&] { validate(mixed); }) == ErrorCode::NonCommutingPair);
    CHECK(check::code_of([&] { combined_trace_Y(circles, 1.0, 1.0); }) != ErrorCode::NonPositiveOperator);
    CHECK(check::code_of([&] { bogolyubov(circles, 1.0, Statistics::Bose, BogolyubovMethod::Spectral); }) ==
          ErrorCode::InvalidArgument);
  }

  TEST_CASE("method names round-trip") {
    for (auto m : {BogolyubovMethod::Spectral, BogolyubovMethod::Kernel}) {
      CHECK(bogolyubov_method_from_string(to_string(m)) == m);
    }
  }
}
