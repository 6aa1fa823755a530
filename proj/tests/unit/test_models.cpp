#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "check.hpp"
#include "oracles.hpp"
#include "speclab/models.hpp"

using namespace speclab;

TEST_SUITE("models") {
  TEST_CASE("twisted massive circle eigenvalues and multiplicities") {
    const Circle c{2.0, 0.25, 1.0};
    const Spectrum s = eigenvalues(c, 10.0);
    std::vector<double> expect;
    for (int k = -30; k <= 30; ++k) {
      const double l = std::pow((k + 0.25) / 2.0, 2) + 1.0;
      if (l <= 10.0) expect.push_back(l);
    }
    std::sort(expect.begin(), expect.end());
    std::vector<double> got;
    for (const auto& e : s.entries) {
      for (int m = 0; m < static_cast<int>(e.multiplicity); ++m) got.push_back(e.lambda);
    }
    REQUIRE(got.size() == expect.size());
    for (size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-14));
  }

  TEST_CASE("square torus level multiplicities") {
    FlatTorus t{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 0.0};
    const Spectrum s = eigenvalues(t, 5.0);
    REQUIRE(s.entries.size() >= 4);
    CHECK(s.entries[0].lambda == 0.0);
    CHECK(s.entries[0].multiplicity == 1.0);
    CHECK(s.entries[1].lambda == doctest::Approx(1.0));
    CHECK(s.entries[1].multiplicity == 4.0);
    CHECK(s.entries[2].lambda == doctest::Approx(2.0));
    CHECK(s.entries[2].multiplicity == 4.0);
    CHECK(s.entries[3].lambda == doctest::Approx(4.0));
    CHECK(s.entries[3].multiplicity == 4.0);
  }

  TEST_CASE("interval spectra with closed forms") {
    const double L = 1.7;
    const Spectrum dd = eigenvalues(Interval{L, BC::dirichlet(), BC::dirichlet()}, 200.0);
    for (size_t k = 0; k < dd.entries.size(); ++k) {
      CHECK(dd.entries[k].lambda == doctest::Approx(std::pow(oracle::pi * (k + 1) / L, 2)).epsilon(1e-13));
    }
    const Spectrum dn = eigenvalues(Interval{L, BC::dirichlet(), BC::neumann()}, 200.0);
    for (size_t k = 0; k < dn.entries.size(); ++k) {
      CHECK(dn.entries[k].lambda == doctest::Approx(std::pow(oracle::pi * (k + 0.5) / L, 2)).epsilon(1e-13));
    }
    const Spectrum nn = eigenvalues(Interval{L, BC::neumann(), BC::neumann()}, 200.0);
    CHECK(nn.entries.front().lambda == 0.0);
    CHECK(nn.zero_multiplicity() == 1.0);
  }

  TEST_CASE("Robin interval eigenvalues match secular-equation bisection") {
    for (const auto& [S1, S2] : {std::pair{0.3, 0.3}, std::pair{-0.4, 1.1}, std::pair{2.0, 0.0}}) {
      const Interval iv{oracle::pi, BC::robin(S1), BC::robin(S2)};
      const Spectrum s = eigenvalues(iv, 400.0);
      const auto ref = oracle::robin_eigenvalues(oracle::pi, S1, S2, 400.0);
      REQUIRE(s.entries.size() == ref.size());
      for (size_t k = 0; k < ref.size(); ++k) {
        CHECK(s.entries[k].lambda == doctest::Approx(ref[k]).epsilon(1e-10).scale(1.0));
        CHECK(std::abs(interval_residual(iv, s.entries[k].lambda)) < 1e-8 * std::max(1.0, std::abs(ref[k])));
      }
    }
  }

  TEST_CASE("positive inward Robin coefficient produces a negative eigenvalue") {
    const Spectrum s = eigenvalues(Interval{oracle::pi, BC::robin(0.3), BC::robin(0.3)}, 10.0);
    CHECK(s.lambda_min() < 0.0);
  }

  TEST_CASE("sphere degeneracies") {
    const Spectrum s = eigenvalues(Sphere2{1.0}, 50.0);
    for (size_t l = 0; l < s.entries.size(); ++l) {
      CHECK(s.entries[l].lambda == doctest::Approx(l * (l + 1.0)));
      CHECK(s.entries[l].multiplicity == 2.0 * l + 1.0);
    }
  }

  TEST_CASE("Dirac circle signed spectrum") {
    const Spectrum s = dirac_eigenvalues(DiracCircle{2.0, 0.25}, 5.0);
    std::vector<double> got;
    for (const auto& e : s.entries) got.push_back(e.lambda);
    CHECK(got == std::vector<double>{-3.5, -1.5, 0.5, 2.5, 4.5});
  }

  TEST_CASE("volumes and dimensions") {
    CHECK(volume(Circle{2.0, 0.0, 0.0}) == doctest::Approx(4.0 * oracle::pi));
    Eigen::MatrixXd G(2, 2);
    G << 4.0, 0.0, 0.0, 1.0;
    CHECK(volume(FlatTorus{G, Eigen::VectorXd::Zero(2), 0.0}) == doctest::Approx(2.0 * oracle::pi * oracle::pi));
    CHECK(volume(Sphere2{2.0}) == doctest::Approx(16.0 * oracle::pi));
    CHECK(dimension(Sphere2{1.0}) == 2);
    CHECK(dimension(Interval{}) == 1);
  }

  TEST_CASE("invalid fields are rejected") {
    CHECK(check::code_of([] { validate(Circle{-1.0, 0.0, 0.0}); }) == ErrorCode::InvalidArgument);
    CHECK(check::code_of([] { validate(Interval{0.0, BC::dirichlet(), BC::dirichlet()}); }) ==
          ErrorCode::InvalidArgument);
    Eigen::MatrixXd G(2, 2);
    G << 1.0, 2.0, 2.0, 1.0;
    CHECK(check::code_of([&] { validate(FlatTorus{G, Eigen::VectorXd::Zero(2), 0.0}); }) ==
          ErrorCode::InvalidArgument);
  }

  TEST_CASE("spectrum JSON round-trip") {
    const Spectrum s = eigenvalues(Circle{1.0, 0.1, 0.5}, 20.0);
    nlohmann::json j;
    to_json(j, s);
    Spectrum back;
    from_json(nlohmann::json::parse(j.dump()), back);
    CHECK(back == s);
  }

  TEST_CASE("lattice enumeration is complete") {
    int count = 0;
    for_each_lattice_point(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), 2.0,
                           [&](const Eigen::VectorXd&) { ++count; });
    CHECK(count == 9);
  }

  TEST_CASE("counting function is monotone and bounded") {
    const ModelOperator m = Circle{1.0, 0.0, 0.0};
    const Spectrum s = eigenvalues(m, 400.0);
    const CountingBound b = counting_bound(m);
    double prev = 0.0;
    for (double l = 0.0; l <= 400.0; l += 7.5) {
      const double n = counting_function(s, l);
      CHECK(n >= prev);
      CHECK(n <= b.coeff * std::pow(b.offset + std::sqrt(l), b.dim) + 1e-9);
      prev = n;
    }
  }
}
