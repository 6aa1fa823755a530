#include <doctest.h>

#include <cmath>

#include "check.hpp"
#include "oracles.hpp"
#include "speclab/invariants.hpp"
#include "speclab/mellin.hpp"
#include "speclab/traces.hpp"
#include "speclab_cli/instances.hpp"

using namespace speclab;

namespace {

// Fits Theta(t) t^{n/2} (4 pi)^{n/2} on a log grid and returns the series in t^{1/2}.
AsymptoticSeries fit_trace(const ModelOperator& m, int n, const std::vector<TemplateTerm>& terms) {
  const HeatTrace trace(m, 2e6);
  std::vector<FitSample> s;
  for (double t = 1e-4; t <= 2e-3; t *= 1.25) {
    s.push_back({t, trace(t).value * std::pow(4.0 * oracle::pi * t, 0.5 * n)});
  }
  return expansion_fit(s, terms, "t");
}

}  // namespace

TEST_SUITE("invariants") {
  TEST_CASE("predicted coefficients of a Dirichlet interval") {
    const auto geo = geometry_of(Interval{2.0, BC::dirichlet(), BC::dirichlet()});
    const auto inv = heat_invariants(geo);
    CHECK(inv.A0 == doctest::Approx(2.0));
    CHECK(inv.A1 == doctest::Approx(-std::sqrt(oracle::pi)));
  }

  TEST_CASE("Robin interval boundary term is tracked by a fit") {
    const double S = 0.3;
    const Interval iv{oracle::pi, BC::robin(S), BC::robin(S)};
    const auto inv = heat_invariants(geometry_of(iv));
    const auto fit = fit_trace(iv, 1, {{0.0, 0}, {0.5, 0}, {1.0, 0}, {1.5, 0}, {2.0, 0}});
    CHECK(check::rel(fit.coefficient(0.0), inv.A0) < 1e-8);
    CHECK(check::rel(fit.coefficient(0.5), inv.A1) < 1e-6);
    // Two Neumann ends give sqrt(pi); the Robin coefficients add 4 S at order t.
    CHECK(inv.A1 == doctest::Approx(std::sqrt(oracle::pi)));
    CHECK(check::rel(fit.coefficient(1.0), 4.0 * S) < 1e-3);
  }

  TEST_CASE("sphere curvature term") {
    const auto fit = fit_trace(Sphere2{1.0}, 2, {{0.0, 0}, {1.0, 0}, {2.0, 0}});
    const auto inv = heat_invariants(geometry_of(Sphere2{1.0}));
    CHECK(check::rel(fit.coefficient(0.0), inv.A0) < 1e-9);
    CHECK(check::rel(fit.coefficient(1.0), inv.A2) < 1e-5);
    CHECK(inv.A2 / inv.A0 == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("predicted series carries the (4 pi)^{-n/2} normalization") {
    const auto geo = geometry_of(Circle{1.0, 0.0, 0.0});
    const auto series = predicted_trace_coeffs(geo);
    CHECK(series.coefficient(-0.5) == doctest::Approx(2.0 * oracle::pi / std::sqrt(4.0 * oracle::pi)));
  }

  TEST_CASE("Clifford oblique symbols match the closed form") {
    for (int n : {2, 3, 4}) {
      for (double kappa : {0.2, 0.5, 0.8}) {
        const auto sym = cli::random_clifford_symbol(n, 3, kappa, 17 + n);
        const double trPi = sym.Pi.trace().real();
        const auto q = ggs_gamma(sym, GammaMethod::Quadrature, 1e-11);
        CHECK(check::rel(q.value, oracle::clifford_gamma(n, 3, trPi, kappa)) < 1e-9);
        CHECK(check::rel(ggs_gamma(sym, GammaMethod::Clifford).value, q.value) < 1e-9);
      }
    }
  }

  TEST_CASE("commuting oblique symbols match the eigenvalue formula") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto sym = cli::random_commuting_symbol(3, 3, seed);
      const double ref = oracle::commuting_gamma(whitened_gammas(sym));
      CHECK(check::rel(ggs_gamma(sym, GammaMethod::Quadrature, 1e-11).value, ref) < 1e-8);
      CHECK(check::rel(ggs_gamma(sym, GammaMethod::Commuting).value, ref) < 1e-12);
    }
  }

  TEST_CASE("zero tangential symbol reduces to mixed conditions") {
    ObliqueSymbol sym;
    sym.n = 3;
    sym.gammas = {Eigen::MatrixXcd::Zero(2, 2), Eigen::MatrixXcd::Zero(2, 2)};
    sym.boundary_metric = Eigen::MatrixXd::Identity(2, 2);
    sym.Pi = Eigen::MatrixXcd::Zero(2, 2);
    sym.Pi(0, 0) = 1.0;
    const auto g = ggs_gamma(sym, GammaMethod::Quadrature);
    CHECK(g.value == doctest::Approx(2.0));
    CHECK(ggs_a1(sym, 3.0) == doctest::Approx(mixed_a1(2, 3.0, 1.0)));
  }

  TEST_CASE("strong tangential symbols lose ellipticity") {
    auto sym = cli::random_clifford_symbol(2, 2, 0.5, 3);
    for (auto& G : sym.gammas) G *= 2.0;
    CHECK(check::code_of([&] { certify_ellipticity(sym); }) == ErrorCode::NotElliptic);
  }

  TEST_CASE("Clifford method refuses non-Clifford data") {
    const auto sym = cli::random_commuting_symbol(3, 3, 5);
    CHECK(check::code_of([&] { ggs_gamma(sym, GammaMethod::Clifford); }) == ErrorCode::WrongAlgebraicStructure);
  }
}
