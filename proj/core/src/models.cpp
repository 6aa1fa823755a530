#include "speclab/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "speclab/errors.hpp"
#include "speclab/numerics.hpp"

namespace speclab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double x, const char* what) {
  require(std::isfinite(x) && x > 0.0, ErrorCode::InvalidArgument, std::string(what) + " must be positive");
}

void require_finite(double x, const char* what) {
  require(std::isfinite(x), ErrorCode::InvalidArgument, std::string(what) + " must be finite");
}

// Merge eigenvalues that agree to rounding; input must be sorted.
std::vector<SpectrumEntry> merge_sorted(const std::vector<SpectrumEntry>& raw) {
  std::vector<SpectrumEntry> out;
  for (const auto& e : raw) {
    if (!out.empty() && std::abs(e.lambda - out.back().lambda) <= 1e-13 * std::max(1.0, std::abs(e.lambda))) {
      out.back().multiplicity += e.multiplicity;
    } else {
      out.push_back(e);
    }
  }
  return out;
}

Spectrum finish(std::vector<SpectrumEntry> raw, double cutoff, const CountingBound& bound) {
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  Spectrum s;
  s.entries = merge_sorted(raw);
  s.cutoff = cutoff;
  s.complete_below_cutoff = true;
  s.tail = bound;
  if (s.entries.empty()) fail(ErrorCode::CutoffTooSmall, "no eigenvalue below cutoff " + std::to_string(cutoff));
  return s;
}

double sinc_like(double lambda, double x) {
  if (lambda > 0.0) {
    const double k = std::sqrt(lambda);
    return std::sin(k * x) / k;
  }
  if (lambda < 0.0) {
    const double k = std::sqrt(-lambda);
    return std::sinh(k * x) / k;
  }
  return x;
}

double cos_like(double lambda, double x) {
  if (lambda > 0.0) return std::cos(std::sqrt(lambda) * x);
  if (lambda < 0.0) return std::cosh(std::sqrt(-lambda) * x);
  return 1.0;
}

std::vector<double> closed_interval_spectrum(const Interval& m, double cutoff) {
  using K = BC::Kind;
  const double base = std::numbers::pi / m.length;
  const bool dl = m.left.kind == K::Dirichlet;
  const bool dr = m.right.kind == K::Dirichlet;
  std::vector<double> out;
  const double shift = (dl == dr) ? 0.0 : 0.5;
  const int first = (dl && dr) ? 1 : 0;
  for (int j = first;; ++j) {
    const double k = (j + shift) * base;
    const double lambda = k * k;
    if (lambda > cutoff) break;
    out.push_back(lambda);
  }
  return out;
}

// Roots of g on [a, b] located by a uniform sign scan followed by TOMS 748.
void scan_roots(const std::function<double(double)>& g, double a, double b, int pieces, std::vector<double>& roots) {
  double x0 = a;
  double g0 = g(x0);
  for (int i = 1; i <= pieces; ++i) {
    const double x1 = a + (b - a) * i / pieces;
    const double g1 = g(x1);
    if (g1 == 0.0) {
      roots.push_back(x1);
    } else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
      boost::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(g, x0, x1, g0, g1,
                                                       boost::math::tools::eps_tolerance<double>(50), iters);
      roots.push_back(0.5 * (r.first + r.second));
    }
    x0 = x1;
    g0 = g1;
  }
}

std::vector<double> robin_interval_spectrum(const Interval& m, double cutoff) {
  const double L = m.length;
  std::vector<double> lambdas;
  const double s_scale = std::abs(m.left.robin_coefficient()) + std::abs(m.right.robin_coefficient());
  // Zero mode.
  const double r0 = interval_residual(m, 0.0);
  if (std::abs(r0) <= 1e-12 * (1.0 + s_scale) * (1.0 + L)) lambdas.push_back(0.0);
  // Negative eigenvalues: lambda = -kappa^2 with kappa bounded by the Robin data.
  if (s_scale > 0.0) {
    const double kmax = 4.0 * s_scale + 1.0;
    std::vector<double> ks;
    const int pieces = 64 + static_cast<int>(64.0 * kmax * L);
    scan_roots([&](double kappa) { return interval_residual(m, -kappa * kappa); }, 0.0, kmax, pieces, ks);
    for (double kappa : ks) {
      if (kappa > 0.0) lambdas.push_back(-kappa * kappa);
    }
  }
  // Positive eigenvalues, bracket by bracket.
  const double base = std::numbers::pi / L;
  const double kmax = std::sqrt(std::max(cutoff, 0.0));
  std::vector<double> ks;
  for (int j = 0; j * base <= kmax + base; ++j) {
    scan_roots([&](double k) { return interval_residual(m, k * k); }, j * base, (j + 1) * base, 16, ks);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  for (double k : ks) {
    if (k > 0.0 && k * k <= cutoff) lambdas.push_back(k * k);
  }
  return lambdas;
}

}  // namespace

double interval_residual(const Interval& m, double lambda) {
  double u = 0.0;
  double du = 0.0;
  const double L = m.length;
  const double c = cos_like(lambda, L);
  const double s = sinc_like(lambda, L);
  if (m.left.kind == BC::Kind::Dirichlet) {
    u = s;
    du = c;
  } else {
    const double s0 = m.left.robin_coefficient();
    u = c - s0 * s;
    du = -lambda * s - s0 * c;
  }
  if (m.right.kind == BC::Kind::Dirichlet) return u;
  return -du + m.right.robin_coefficient() * u;
}

void validate(const ModelOperator& model) {
  std::visit(overloaded{
                 [](const Circle& c) {
                   require_positive(c.radius, "radius");
                   require_finite(c.twist, "twist");
                   require(std::isfinite(c.mass2) && c.mass2 >= 0.0, ErrorCode::InvalidArgument,
                           "mass2 must be non-negative");
                 },
                 [](const FlatTorus& t) {
                   const auto n = t.inverse_metric.rows();
                   require(n >= 1 && t.inverse_metric.cols() == n, ErrorCode::InvalidArgument,
                           "inverse metric must be square");
                   require(t.twist.size() == n, ErrorCode::InvalidArgument, "twist length must equal dimension");
                   require(t.inverse_metric.isApprox(t.inverse_metric.transpose(), 1e-14),
                           ErrorCode::InvalidArgument, "inverse metric must be symmetric");
                   Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.inverse_metric);
                   require(es.eigenvalues().minCoeff() > 0.0, ErrorCode::InvalidArgument,
                           "inverse metric must be positive definite");
                   require(t.twist.allFinite(), ErrorCode::InvalidArgument, "twist must be finite");
                   require(std::isfinite(t.mass2) && t.mass2 >= 0.0, ErrorCode::InvalidArgument,
                           "mass2 must be non-negative");
                 },
                 [](const Interval& i) {
                   require_positive(i.length, "length");
                   require_finite(i.left.S, "Robin S");
                   require_finite(i.right.S, "Robin S");
                 },
                 [](const Sphere2& s) { require_positive(s.radius, "radius"); },
                 [](const Landau& l) {
                   require_positive(l.field, "field");
                   require(std::isfinite(l.mass2) && l.mass2 >= 0.0, ErrorCode::InvalidArgument,
                           "mass2 must be non-negative");
                 },
                 [](const DiracCircle& d) {
                   require(std::isfinite(d.frame) && d.frame != 0.0, ErrorCode::InvalidArgument,
                           "frame must be nonzero");
                   require_finite(d.twist, "twist");
                 },
             },
             model);
}

std::string model_name(const ModelOperator& model) {
  return std::visit(overloaded{
                        [](const Circle&) { return std::string("circle"); },
                        [](const FlatTorus&) { return std::string("torus"); },
                        [](const Interval&) { return std::string("interval"); },
                        [](const Sphere2&) { return std::string("sphere"); },
                        [](const Landau&) { return std::string("landau"); },
                        [](const DiracCircle&) { return std::string("dirac-circle"); },
                    },
                    model);
}

int dimension(const ModelOperator& model) {
  return std::visit(overloaded{
                        [](const Circle&) { return 1; },
                        [](const FlatTorus& t) { return t.dim(); },
                        [](const Interval&) { return 1; },
                        [](const Sphere2&) { return 2; },
                        [](const Landau&) { return 2; },
                        [](const DiracCircle&) { return 1; },
                    },
                    model);
}

double volume(const ModelOperator& model) {
  constexpr double pi = std::numbers::pi;
  return std::visit(overloaded{
                        [](const Circle& c) { return 2.0 * pi * c.radius; },
                        [](const FlatTorus& t) {
                          return std::pow(2.0 * pi, t.dim()) / std::sqrt(t.inverse_metric.determinant());
                        },
                        [](const Interval& i) { return i.length; },
                        [](const Sphere2& s) { return 4.0 * pi * s.radius * s.radius; },
                        [](const Landau&) { return 1.0; },
                        [](const DiracCircle&) { return 2.0 * pi; },
                    },
                    model);
}

Eigen::VectorXd canonical_twist(const Eigen::VectorXd& theta) {
  Eigen::VectorXd out = theta;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) -= std::floor(out(i));
  if (out.size() == 1 && out(0) > 0.5) out(0) = 1.0 - out(0);
  return out;
}

std::optional<LatticeForm> lattice_form(const ModelOperator& model) {
  if (const auto* c = std::get_if<Circle>(&model)) {
    LatticeForm f;
    f.G = Eigen::MatrixXd::Constant(1, 1, 1.0 / (c->radius * c->radius));
    f.theta = canonical_twist(Eigen::VectorXd::Constant(1, c->twist));
    f.mass2 = c->mass2;
    return f;
  }
  if (const auto* t = std::get_if<FlatTorus>(&model)) {
    LatticeForm f;
    f.G = t->inverse_metric;
    f.theta = canonical_twist(t->twist);
    f.mass2 = t->mass2;
    return f;
  }
  return std::nullopt;
}

void for_each_lattice_point(const Eigen::MatrixXd& G, const Eigen::VectorXd& theta, double radius2,
                            const std::function<void(const Eigen::VectorXd&)>& f) {
  const int n = static_cast<int>(G.rows());
  if (radius2 < 0.0) return;
  const Eigen::MatrixXd Ginv = G.inverse();
  std::vector<long> lo(n), hi(n), k(n);
  for (int i = 0; i < n; ++i) {
    const double w = std::sqrt(radius2 * Ginv(i, i));
    lo[i] = static_cast<long>(std::ceil(-theta(i) - w));
    hi[i] = static_cast<long>(std::floor(-theta(i) + w));
    if (lo[i] > hi[i]) return;
    k[i] = lo[i];
  }
  Eigen::VectorXd v(n);
  while (true) {
    for (int i = 0; i < n; ++i) v(i) = static_cast<double>(k[i]) + theta(i);
    if (v.dot(G * v) <= radius2) f(v);
    int d = 0;
    while (d < n && ++k[d] > hi[d]) {
      k[d] = lo[d];
      ++d;
    }
    if (d == n) break;
  }
}

CountingBound counting_bound(const ModelOperator& model) {
  constexpr double pi = std::numbers::pi;
  return std::visit(overloaded{
                        [](const Circle& c) { return CountingBound{1, 2.0 * c.radius, 0.5 / c.radius}; },
                        [](const FlatTorus& t) {
                          const int n = t.dim();
                          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.inverse_metric);
                          const double lmin = es.eigenvalues().minCoeff();
                          const double ball = std::pow(pi, 0.5 * n) / boost::math::tgamma(0.5 * n + 1.0);
                          return CountingBound{n, ball * std::pow(lmin, -0.5 * n), 0.5 * std::sqrt(n * lmin)};
                        },
                        [](const Interval& i) { return CountingBound{1, i.length / pi, 3.0 * pi / i.length}; },
                        [](const Sphere2& s) { return CountingBound{2, s.radius * s.radius, 1.0 / s.radius}; },
                        [](const Landau& l) { return CountingBound{2, 0.25 / pi, std::sqrt(2.0 * l.field)}; },
                        [](const DiracCircle& d) {
                          const double e = std::abs(d.frame);
                          return CountingBound{1, 2.0 / e, 0.5 * e};
                        },
                    },
                    model);
}

Spectrum eigenvalues(const ModelOperator& model, double cutoff) {
  validate(model);
  require(std::isfinite(cutoff) && cutoff > 0.0, ErrorCode::InvalidArgument, "cutoff must be positive");
  const CountingBound bound = counting_bound(model);
  if (auto lat = lattice_form(model)) {
    std::vector<SpectrumEntry> raw;
    for_each_lattice_point(lat->G, lat->theta, cutoff - lat->mass2, [&](const Eigen::VectorXd& v) {
      raw.push_back({v.dot(lat->G * v) + lat->mass2, 1.0});
    });
    return finish(std::move(raw), cutoff, bound);
  }
  return std::visit(
      overloaded{
          [&](const Interval& i) {
            const bool closed = i.left.kind != BC::Kind::Robin && i.right.kind != BC::Kind::Robin;
            const auto lambdas = closed ? closed_interval_spectrum(i, cutoff) : robin_interval_spectrum(i, cutoff);
            std::vector<SpectrumEntry> raw;
            for (double l : lambdas) raw.push_back({l, 1.0});
            return finish(std::move(raw), cutoff, bound);
          },
          [&](const Sphere2& s) {
            std::vector<SpectrumEntry> raw;
            const double r2 = s.radius * s.radius;
            for (int l = 0;; ++l) {
              const double lambda = l * (l + 1.0) / r2;
              if (lambda > cutoff) break;
              raw.push_back({lambda, 2.0 * l + 1.0});
            }
            return finish(std::move(raw), cutoff, bound);
          },
          [&](const Landau& l) {
            std::vector<SpectrumEntry> raw;
            const double density = l.field / (2.0 * std::numbers::pi);
            for (int k = 0;; ++k) {
              const double lambda = l.field * (2.0 * k + 1.0) + l.mass2;
              if (lambda > cutoff) break;
              raw.push_back({lambda, density});
            }
            auto spec = finish(std::move(raw), cutoff, bound);
            spec.per_unit_volume = true;
            return spec;
          },
          [&](const DiracCircle&) -> Spectrum {
            fail(ErrorCode::InvalidArgument, "use dirac_eigenvalues for Dirac operators");
          },
          [&](const auto&) -> Spectrum { fail(ErrorCode::InvalidArgument, "unreachable model kind"); },
      },
      model);
}

Spectrum dirac_eigenvalues(const DiracCircle& model, double cutoff) {
  validate(model);
  require(std::isfinite(cutoff) && cutoff > 0.0, ErrorCode::InvalidArgument, "cutoff must be positive");
  const double e = std::abs(model.frame);
  const double theta = model.twist - std::floor(model.twist);
  const long kmax = static_cast<long>(std::floor(cutoff / e)) + 1;
  std::vector<SpectrumEntry> raw;
  for (long k = -kmax - 1; k <= kmax + 1; ++k) {
    const double d = model.frame * (static_cast<double>(k) + theta);
    if (std::abs(d) <= cutoff) raw.push_back({d, 1.0});
  }
  return finish(std::move(raw), cutoff, counting_bound(model));
}

Spectrum Spectrum::finite(std::vector<SpectrumEntry> entries) {
  for (const auto& e : entries) {
    require(std::isfinite(e.lambda) && e.multiplicity > 0.0, ErrorCode::InvalidArgument,
            "spectrum entries need finite eigenvalues and positive multiplicities");
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  Spectrum s;
  s.entries = merge_sorted(entries);
  s.cutoff = s.entries.empty() ? 0.0 : s.entries.back().lambda;
  s.complete_below_cutoff = true;
  s.tail = CountingBound{};
  return s;
}

double Spectrum::lambda_min() const {
  require(!entries.empty(), ErrorCode::InvalidArgument, "empty spectrum");
  return entries.front().lambda;
}

double Spectrum::lambda_max() const {
  require(!entries.empty(), ErrorCode::InvalidArgument, "empty spectrum");
  return entries.back().lambda;
}

double Spectrum::zero_multiplicity() const {
  double z = 0.0;
  for (const auto& e : entries) {
    if (e.lambda == 0.0) z += e.multiplicity;
  }
  return z;
}

Spectrum Spectrum::without_zero_modes() const {
  Spectrum s = *this;
  std::erase_if(s.entries, [](const SpectrumEntry& e) { return e.lambda == 0.0; });
  return s;
}

double counting_function(const Spectrum& spec, double lambda) {
  require(lambda <= spec.cutoff, ErrorCode::AboveCutoff,
          "lambda " + std::to_string(lambda) + " exceeds cutoff " + std::to_string(spec.cutoff));
  num::CompensatedSum sum;
  for (const auto& e : spec.entries) {
    if (e.lambda > lambda) break;
    sum.add(e.multiplicity);
  }
  return sum.value();
}

void to_json(nlohmann::json& j, const Spectrum& s) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : s.entries) entries.push_back({e.lambda, e.multiplicity});
  j = nlohmann::json{{"entries", entries},
                     {"cutoff", s.cutoff},
                     {"complete_below_cutoff", s.complete_below_cutoff},
                     {"per_unit_volume", s.per_unit_volume},
                     {"tail", {{"dim", s.tail.dim}, {"coeff", s.tail.coeff}, {"offset", s.tail.offset}}}};
}

void from_json(const nlohmann::json& j, Spectrum& s) {
  s = Spectrum{};
  for (const auto& e : j.at("entries")) s.entries.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  s.cutoff = j.at("cutoff").get<double>();
  s.complete_below_cutoff = j.value("complete_below_cutoff", true);
  s.per_unit_volume = j.value("per_unit_volume", false);
  if (j.contains("tail")) {
    const auto& t = j.at("tail");
    s.tail = CountingBound{t.at("dim").get<int>(), t.at("coeff").get<double>(), t.at("offset").get<double>()};
  }
}

}  // namespace speclab
