#include <doctest.h>

#include <cmath>

#include "check.hpp"
#include "oracles.hpp"
#include "speclab/mellin.hpp"

using namespace speclab;

TEST_SUITE("mellin") {
  const ModelOperator massive = Circle{1.0, 0.0, 1.0};
  const ModelOperator massless = Circle{1.0, 0.0, 0.0};

  TEST_CASE("A_q of the massive circle at integers") {
    for (double q : {0.0, 1.0, 2.0}) {
      const auto a = a_q(massive, q, static_cast<int>(q) + 2);
      CHECK(check::rel(a.value.real(), oracle::circle_aq(q, 1.0)) < 1e-9);
      CHECK(std::abs(a.value.imag()) < 1e-12);
    }
  }

  TEST_CASE("A_q at q = 1/2 resolves the theta images") {
    const auto a = a_q(massive, 0.5, 2);
    CHECK(std::abs(a.value.real() - oracle::circle_aq_half()) < 1e-9);
    CHECK(check::rel(a.value.real(), 2.0 * oracle::pi) < 2e-3);
  }

  TEST_CASE("A_q is finite and continuous across q = 1") {
    const double lo = a_q(massive, 1.0 - 1e-6, 3).value.real();
    const double hi = a_q(massive, 1.0 + 1e-6, 3).value.real();
    CHECK(std::isfinite(lo));
    CHECK(std::isfinite(hi));
    CHECK(std::abs(hi - lo) < 1e-4);
  }

  TEST_CASE("standard coefficients of exp(-t) sqrt(pi / t)") {
    for (int k = 0; k < 4; ++k) {
      CHECK(standard_coefficient(massive, k) ==
            doctest::Approx(2.0 * oracle::pi * std::pow(-1.0, k) / std::tgamma(k + 1.0)).epsilon(1e-8));
    }
  }

  TEST_CASE("zeta function of the circle without its zero mode") {
    const SpectralQuery q{0.0, true};
    CHECK(check::rel(zeta(massless, 1.0, q).value.real(), oracle::pi * oracle::pi / 3.0) < 1e-10);
    CHECK(check::rel(zeta(massless, 2.0, q).value.real(), std::pow(oracle::pi, 4) / 45.0) < 1e-10);
    CHECK(check::rel(zeta(massless, 0.75, q).value.real(), oracle::circle_zeta(0.75)) < 1e-8);
    CHECK(check::rel(zeta(massless, 1.0, q, ZetaMethod::Direct).value.real(), oracle::pi * oracle::pi / 3.0) < 1e-8);
    CHECK(zeta(massless, 0.0, q).value.real() == doctest::Approx(-1.0).epsilon(1e-9));
  }

  TEST_CASE("zeta pole and zero-mode preconditions") {
    CHECK(check::code_of([&] { zeta(massless, 0.5, {0.0, true}); }) == ErrorCode::PoleOfZeta);
    CHECK(check::code_of([&] { zeta(massless, 1.0); }) == ErrorCode::NonPositiveOperator);
  }

  TEST_CASE("zeta-regularized determinants") {
    const auto d = log_det(massless, {0.0, true});
    CHECK(check::rel(d.det, 4.0 * oracle::pi * oracle::pi) < 1e-6);
    const auto di = log_det(Interval{oracle::pi, BC::dirichlet(), BC::dirichlet()});
    CHECK(di.log_det == doctest::Approx(std::log(2.0 * oracle::pi)).epsilon(1e-7));
    CHECK(zeta(Interval{oracle::pi, BC::dirichlet(), BC::dirichlet()}, 1.0).value.real() ==
          doctest::Approx(oracle::pi * oracle::pi / 6.0).epsilon(1e-10));
  }

  TEST_CASE("finite spectra use exact sums") {
    const Spectrum s = Spectrum::finite({{1.0, 1.0}, {2.0, 2.0}, {4.0, 1.0}});
    CHECK(zeta(s, 1.0).value.real() == doctest::Approx(1.0 + 1.0 + 0.25));
    CHECK(log_det(s).log_det == doctest::Approx(2.0 * std::log(2.0) + std::log(4.0)));
  }

  TEST_CASE("expansion fit recovers an exact template") {
    std::vector<FitSample> s;
    for (double e : {0.1, 0.2, 0.3, 0.4, 0.5, 1.0}) s.push_back({e, 2.0 / e + 3.0 + e});
    const auto f = expansion_fit(s, {{-1.0, 0}, {0.0, 0}, {1.0, 0}});
    CHECK(f.coefficient(-1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.coefficient(0.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.coefficient(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(f.diagnostics.has_value());
    CHECK(f.diagnostics->spans_decade);
  }

  TEST_CASE("expansion fit needs more samples than terms") {
    std::vector<FitSample> s{{0.1, 1.0}, {0.2, 2.0}, {0.3, 3.0}};
    CHECK(check::code_of([&] { expansion_fit(s, {{0.0, 0}, {1.0, 0}}); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("small-time form is exact for lattice models") {
    const auto f = small_time_form(massive);
    for (double t : {0.01, 0.1, 1.0}) {
      double s = 0.0;
      for (const auto& [p, c] : f.terms) s += c * std::pow(t, p);
      CHECK(check::rel(std::exp(-t * f.decay) * (s + f.remainder(t)), oracle::circle_theta(t, 1.0, 0.0, 1.0)) < 1e-12);
    }
  }
}
