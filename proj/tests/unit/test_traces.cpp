#include <doctest.h>

#include <cmath>

#include "check.hpp"
#include "oracles.hpp"
#include "speclab/traces.hpp"

using namespace speclab;

TEST_SUITE("traces") {
  TEST_CASE("circle heat trace: direct, theta and brute force agree") {
    const HeatTrace trace(Circle{1.0, 0.0, 0.0}, 1e5);
    for (double t : {0.01, 0.3, 1.0, 4.0}) {
      const double ref = oracle::circle_theta(t);
      CHECK(check::rel(trace(t, TraceMethod::Direct).value, ref) < 1e-13);
      CHECK(check::rel(trace(t, TraceMethod::Theta).value, ref) < 1e-13);
    }
    CHECK(trace(1.0).value == doctest::Approx(1.7726372048).epsilon(1e-10));
  }

  TEST_CASE("twisted massive circle of radius 2") {
    const HeatTrace trace(Circle{2.0, 0.3, 0.7});
    for (double t : {0.02, 0.5, 2.0}) {
      CHECK(check::rel(trace(t).value, oracle::circle_theta(t, 2.0, 0.3, 0.7)) < 1e-12);
    }
  }

  TEST_CASE("interval heat traces for the three closed boundary pairs") {
    const double L = 2.0;
    const std::pair<Interval, oracle::Ends> cases[] = {
        {{L, BC::dirichlet(), BC::dirichlet()}, oracle::Ends::DD},
        {{L, BC::neumann(), BC::neumann()}, oracle::Ends::NN},
        {{L, BC::dirichlet(), BC::neumann()}, oracle::Ends::DN},
    };
    for (const auto& [iv, ends] : cases) {
      const HeatTrace trace(iv);
      for (double t : {1e-3, 0.1, 1.0, 5.0}) {
        CHECK(check::rel(trace(t).value, oracle::interval_theta(t, L, ends)) < 1e-12);
      }
    }
  }

  TEST_CASE("Robin interval trace against bisected eigenvalues") {
    const Interval iv{oracle::pi, BC::robin(0.3), BC::robin(-0.2)};
    const HeatTrace trace(iv, 4e4);
    const auto ev = oracle::robin_eigenvalues(oracle::pi, 0.3, -0.2, 4e4);
    for (double t : {0.01, 0.3}) {
      long double s = 0;
      for (double l : ev) s += std::exp(-static_cast<long double>(t) * l);
      CHECK(check::rel(trace(t, TraceMethod::Direct).value, static_cast<double>(s)) < 1e-10);
    }
  }

  TEST_CASE("sphere heat trace") {
    const HeatTrace trace(Sphere2{1.0});
    for (double t : {0.05, 0.5, 2.0}) CHECK(check::rel(trace(t).value, oracle::sphere_theta(t)) < 1e-12);
  }

  TEST_CASE("relativistic trace of the circle is coth(beta/2) on both paths") {
    const ModelOperator c = Circle{1.0, 0.0, 0.0};
    const HeatTrace trace(c, sqrt_cutoff(c, 0.5));
    for (double beta : {0.5, 1.0, 2.0}) {
      CHECK(check::rel(relativistic_trace(trace, beta, SumPath::Direct).value, oracle::circle_relativistic(beta)) <
            1e-12);
      CHECK(check::rel(relativistic_trace(trace, beta, SumPath::Integral).value,
                       oracle::circle_relativistic(beta)) < 1e-10);
    }
  }

  TEST_CASE("Bose and Fermi traces against brute-force occupation sums") {
    const ModelOperator c = Circle{1.0, 0.0, 1.0};
    const HeatTrace trace(c, std::max(heat_cutoff(c, 1.0), sqrt_cutoff(c, 0.2)));
    for (double beta : {0.2, 1.0}) {
      for (double mu : {0.0, 0.5}) {
        const double bose = oracle::lattice_occupation(1, beta, mu, 1.0, -1, 4000);
        const double fermi = oracle::lattice_occupation(1, beta, mu, 1.0, +1, 4000);
        CHECK(check::rel(quantum_trace(trace, beta, mu, Statistics::Bose, SumPath::Direct).value, bose) < 1e-12);
        CHECK(check::rel(quantum_trace(trace, beta, mu, Statistics::Bose, SumPath::Integral).value, bose) < 1e-9);
        CHECK(check::rel(quantum_trace(trace, beta, mu, Statistics::Fermi, SumPath::Direct).value, fermi) < 1e-12);
        CHECK(check::rel(quantum_trace(trace, beta, mu, Statistics::Fermi, SumPath::Integral).value, fermi) < 1e-9);
      }
    }
  }

  TEST_CASE("two-torus Fermi trace") {
    const ModelOperator t = FlatTorus{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 1.0};
    const HeatTrace trace(t, std::max(heat_cutoff(t, 1.0), sqrt_cutoff(t, 0.5)));
    const double ref = oracle::lattice_occupation(2, 0.5, 0.5, 1.0, +1, 120);
    CHECK(check::rel(quantum_trace(trace, 0.5, 0.5, Statistics::Fermi, SumPath::Direct).value, ref) < 1e-12);
    CHECK(check::rel(quantum_trace(trace, 0.5, 0.5, Statistics::Fermi, SumPath::Integral).value, ref) < 1e-9);
  }

  TEST_CASE("Bose condensation threshold is a validation error") {
    const HeatTrace trace(Circle{1.0, 0.0, 1.0});
    const auto code = check::code_of([&] { quantum_trace(trace, 1.0, 5.0, Statistics::Bose, SumPath::Direct); });
    CHECK(code == ErrorCode::BoseDivergence);
    CHECK(is_validation_error(code));
  }

  TEST_CASE("truncated spectra refuse to hide their tail") {
    const HeatTrace trace(Circle{1.0, 0.0, 0.0}, 4.0);
    CHECK(check::code_of([&] { trace(1e-3, TraceMethod::Direct); }) == ErrorCode::TailTooLarge);
  }

  TEST_CASE("statistics names round-trip") {
    for (auto s : {Statistics::Boltzmann, Statistics::Relativistic, Statistics::Bose, Statistics::Fermi}) {
      CHECK(statistics_from_string(to_string(s)) == s);
    }
    CHECK(check::code_of([] { statistics_from_string("maxwell"); }) == ErrorCode::InvalidArgument);
  }
}
