#include "speclab/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include "speclab/errors.hpp"

namespace speclab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveOperator: return "NonPositiveOperator";
    case ErrorCode::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorCode::AboveCutoff: return "AboveCutoff";
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::BoseDivergence: return "BoseDivergence";
    case ErrorCode::InsufficientOrder: return "InsufficientOrder";
    case ErrorCode::PoleOfZeta: return "PoleOfZeta";
    case ErrorCode::NonPositiveShiftedOperator: return "NonPositiveShiftedOperator";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotElliptic: return "NotElliptic";
    case ErrorCode::WrongAlgebraicStructure: return "WrongAlgebraicStructure";
    case ErrorCode::ContourTooShort: return "ContourTooShort";
    case ErrorCode::CurvedScopeUnsupported: return "CurvedScopeUnsupported";
    case ErrorCode::SingularD: return "SingularD";
    case ErrorCode::NonIntegrableDiagonal: return "NonIntegrableDiagonal";
    case ErrorCode::NonCommutingPair: return "NonCommutingPair";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::KernelNotBounded: return "KernelNotBounded";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::NonPositiveOperator:
    case ErrorCode::CutoffTooSmall:
    case ErrorCode::AboveCutoff:
    case ErrorCode::BoseDivergence:
    case ErrorCode::NonPositiveShiftedOperator:
    case ErrorCode::NotElliptic:
    case ErrorCode::WrongAlgebraicStructure:
    case ErrorCode::CurvedScopeUnsupported:
    case ErrorCode::NonCommutingPair:
    case ErrorCode::UnsupportedModel:
    case ErrorCode::PoleOfZeta:
      return true;
    default:
      return false;
  }
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace speclab

namespace speclab::num {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const auto half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace {

// Globally adaptive Gauss-Kronrod (G10/K21) in the QUADPACK QAG style: always
// bisect the panel with the largest error estimate. Node tables from Boost.
template <class V>
struct Panel {
  double a, b;
  V value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

double magnitude(double x) { return std::abs(x); }
double magnitude(cplx z) { return std::abs(z); }

template <class V, class F>
Panel<V> kronrod_panel(const F& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  static const auto& xk = GK::abscissa();
  static const auto& wk = GK::weights();
  using G = boost::math::quadrature::gauss<double, 10>;
  static const auto& wg = G::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  V kron{};
  V gauss{};
  // xk[0] == 0; the ten Gauss nodes sit at the odd Kronrod indices.
  const V f0 = f(mid);
  kron += wk[0] * f0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double dx = half * xk[i];
    const V s = f(mid - dx) + f(mid + dx);
    kron += wk[i] * s;
    if (i % 2 == 1) gauss += wg[(i - 1) / 2] * s;
  }
  kron *= half;
  gauss *= half;
  return {a, b, kron, magnitude(kron - gauss)};
}

template <class V, class F>
std::pair<V, double> adaptive(const F& f, double a, double b, double rel_tol, double abs_tol,
                              unsigned max_depth) {
  std::vector<Panel<V>> heap;
  heap.push_back(kronrod_panel<V>(f, a, b));
  const std::size_t max_panels = std::size_t{1} << std::min(max_depth, 16u);
  V total = heap.front().value;
  double err = heap.front().error;
  while (true) {
    if (!std::isfinite(magnitude(total))) fail(ErrorCode::QuadratureFailure, "non-finite integrand");
    if (err <= std::max(rel_tol * magnitude(total), abs_tol)) break;
    if (heap.size() >= max_panels) break;
    std::pop_heap(heap.begin(), heap.end());
    const Panel<V> worst = heap.back();
    heap.pop_back();
    const double m = 0.5 * (worst.a + worst.b);
    if (m <= worst.a || m >= worst.b) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    heap.push_back(kronrod_panel<V>(f, worst.a, m));
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(kronrod_panel<V>(f, m, worst.b));
    std::push_heap(heap.begin(), heap.end());
    // Recompute sums from scratch in a fixed order to keep results deterministic.
    std::vector<Panel<V>> ordered = heap;
    std::sort(ordered.begin(), ordered.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
    total = V{};
    err = 0.0;
    for (const auto& p : ordered) {
      total += p.value;
      err += p.error;
    }
  }
  return {total, err};
}

}  // namespace

Estimate integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                   double abs_tol, unsigned max_depth) {
  const auto [value, err] = adaptive<double>(f, a, b, rel_tol, abs_tol, max_depth);
  if (err > std::max(rel_tol * std::abs(value), abs_tol)) {
    fail(ErrorCode::QuadratureFailure,
         "achieved error " + std::to_string(err) + " on value " + std::to_string(value));
  }
  return {value, err};
}

ComplexEstimate integrate(const std::function<cplx(double)>& f, double a, double b, double rel_tol,
                          double abs_tol, unsigned max_depth) {
  const auto [value, err] = adaptive<cplx>(f, a, b, rel_tol, abs_tol, max_depth);
  if (err > std::max(rel_tol * std::abs(value), abs_tol)) {
    fail(ErrorCode::QuadratureFailure, "achieved error " + std::to_string(err) + " on complex integral");
  }
  return {value, err};
}

Estimate integrate_log_line(const std::function<double(double)>& f, double rel_tol, double u_center) {
  auto g = [&](double u) {
    const double t = std::exp(u);
    return t * f(t);
  };
  CompensatedSum total;
  double total_err = 0.0;
  const auto run = [&](int direction) {
    int negligible = 0;
    for (int k = 0; k < 400; ++k) {
      const double lo = direction > 0 ? u_center + k : u_center - k - 1;
      // Panels far in the tails only need accuracy relative to what has accumulated.
      const double abs_tol = std::max(1e-300, 0.01 * rel_tol * std::abs(total.value()));
      const auto [v, e] = adaptive<double>(g, lo, lo + 1.0, 0.05 * rel_tol, abs_tol, 10);
      if (!std::isfinite(v)) fail(ErrorCode::QuadratureFailure, "non-finite panel");
      total.add(v);
      total_err += e;
      const double edge = direction > 0 ? lo + 1.0 : lo;
      const double scale = std::abs(total.value());
      const bool small = std::abs(v) <= 1e-17 * scale && std::abs(g(edge)) <= 1e-17 * scale;
      negligible = small ? negligible + 1 : 0;
      if (negligible >= 2) return;
    }
    fail(ErrorCode::QuadratureFailure, "integrand does not decay on the log line");
  };
  run(+1);
  run(-1);
  const double value = total.value();
  if (total_err > rel_tol * std::abs(value) + 1e-300) {
    fail(ErrorCode::QuadratureFailure, "log-line quadrature error " + std::to_string(total_err));
  }
  return {value, total_err};
}

const GaussHermiteRule& gauss_hermite(int order) {
  static std::mutex mu;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(order); it != cache.end()) return it->second;
  require(order >= 1, ErrorCode::InvalidArgument, "Gauss-Hermite order must be positive");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  // Eigenvector weights lose all relative accuracy once they drop below ~1e-32, so the
  // eigenvalues only seed Newton steps on the orthonormal recurrence, and the weights come
  // from w = 2 / p_n'(x)^2, which stays accurate far into the tails.
  const auto orthonormal = [order](double x) {
    double p0 = std::pow(std::numbers::pi, -0.25), p1 = 0.0;
    for (int j = 1; j <= order; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = x * std::sqrt(2.0 / j) * p1 - std::sqrt((j - 1.0) / j) * p2;
    }
    return std::pair{p0, std::sqrt(2.0 * order) * p1};  // p_n(x), p_n'(x)
  };
  for (int k = 0; k < order; ++k) {
    double x = es.eigenvalues()(k);
    for (int it = 0; it < 10; ++it) {
      const auto [p, dp] = orthonormal(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    const double dp = orthonormal(x).second;
    rule.nodes[k] = x;
    rule.weights[k] = 2.0 / (dp * dp);
  }
  // Symmetrize to make odd integrands vanish to rounding.
  for (int k = 0; k < order / 2; ++k) {
    const int j = order - 1 - k;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[j] + rule.weights[k]);
    rule.nodes[k] = -x;
    rule.nodes[j] = x;
    rule.weights[k] = rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return cache.emplace(order, std::move(rule)).first->second;
}

double gauss_hermite_tensor(int dim, int order, const std::function<double(std::span<const double>)>& f) {
  if (dim == 0) {
    return f(std::span<const double>{});
  }
  const auto& rule = gauss_hermite(order);
  std::vector<int> idx(dim, 0);
  std::vector<double> x(dim);
  CompensatedSum sum;
  while (true) {
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      x[d] = rule.nodes[idx[d]];
      w *= rule.weights[idx[d]];
    }
    sum.add(w * f(x));
    int d = 0;
    while (d < dim && ++idx[d] == order) {
      idx[d] = 0;
      ++d;
    }
    if (d == dim) break;
  }
  return sum.value();
}

namespace {

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;

cplx lanczos_gamma(cplx z) {
  // valid for Re z >= 0.5
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

cplx lanczos_lgamma(cplx z) {
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace

cplx sinpi(cplx z) {
  const double n = std::round(z.real());
  const cplx r = z - n;
  const double sign = (static_cast<long long>(n) % 2 == 0) ? 1.0 : -1.0;
  if (r == cplx{0.0, 0.0}) return {0.0, 0.0};
  return sign * std::sin(std::numbers::pi * r);
}

cplx gamma(cplx z) {
  if (z.real() < 0.5) {
    return std::numbers::pi / (sinpi(z) * lanczos_gamma(1.0 - z));
  }
  return lanczos_gamma(z);
}

cplx lgamma(cplx z) {
  if (z.real() < 0.5) {
    return std::log(std::numbers::pi) - std::log(sinpi(z)) - lanczos_lgamma(1.0 - z);
  }
  return lanczos_lgamma(z);
}

cplx rgamma(cplx z) {
  if (z.real() < 0.5) {
    return sinpi(z) * lanczos_gamma(1.0 - z) / std::numbers::pi;
  }
  if (z.real() > 100.0) return std::exp(-lanczos_lgamma(z));
  return 1.0 / lanczos_gamma(z);
}

cplx rgamma_div(cplx z, int k) {
  cplx prod = 1.0;
  for (int j = 0; j < k; ++j) prod *= z + static_cast<double>(j);
  return prod * rgamma(z + static_cast<double>(k + 1));
}

double exp_tail(double x, int order) {
  if (order <= 0) return std::exp(x);
  if (std::abs(x) > 20.0) {
    double partial = 0.0;
    double term = 1.0;
    for (int j = 0; j < order; ++j) {
      partial += term;
      term *= x / (j + 1);
    }
    return std::exp(x) - partial;
  }
  double term = 1.0;
  for (int j = 1; j <= order; ++j) term *= x / j;
  double sum = 0.0;
  for (int j = order; j < order + 200; ++j) {
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    term *= x / (j + 1);
  }
  return sum;
}

double weyl_tail_bound(int dim, double coeff, double offset, double cutoff, double t) {
  double bound = 0.0;
  for (int j = 0; j <= dim; ++j) {
    const double binom = boost::math::binomial_coefficient<double>(dim, j);
    const double a = 0.5 * j + 1.0;
    bound += binom * std::pow(offset, dim - j) * std::pow(t, -0.5 * j) *
             boost::math::tgamma(a, t * cutoff);
  }
  return coeff * bound;
}

double weyl_tail_bound_sqrt(int dim, double coeff, double offset, double cutoff, double beta) {
  return coeff * std::exp(beta * offset) * std::pow(beta, -dim) *
         boost::math::tgamma(static_cast<double>(dim + 1), beta * (offset + std::sqrt(cutoff)));
}

Eigen::MatrixXd sym_function(const Eigen::MatrixXd& sym, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd d = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

/// Visits points of a hyperspherical angle grid on S^{d-1} with step h.
void for_each_sphere_point(int d, double h, const std::function<void(std::span<const double>)>& f) {
  std::vector<double> x(d);
  if (d == 1) {
    x[0] = 1.0;
    f(x);
    x[0] = -1.0;
    f(x);
    return;
  }
  std::vector<double> angles(d - 1);
  std::function<void(int)> rec = [&](int level) {
    if (level == d - 1) {
      double s = 1.0;
      for (int k = 0; k < d - 1; ++k) {
        x[k] = s * std::cos(angles[k]);
        s *= std::sin(angles[k]);
      }
      x[d - 1] = s;
      f(x);
      return;
    }
    const bool last = level == d - 2;
    const double range = last ? 2.0 * std::numbers::pi : std::numbers::pi;
    const int steps = static_cast<int>(std::ceil(range / h));
    const int count = last ? steps : steps + 1;
    for (int i = 0; i < count; ++i) {
      angles[level] = range * i / steps;
      rec(level + 1);
    }
  };
  rec(0);
}

long sphere_point_count(int d, double h) {
  if (d == 1) return 2;
  long count = static_cast<long>(std::ceil(2.0 * std::numbers::pi / h));
  for (int k = 0; k < d - 2; ++k) count *= static_cast<long>(std::ceil(std::numbers::pi / h)) + 1;
  return count;
}

QuadraticFormBounds quadratic_form_bounds(int d, const std::function<Eigen::VectorXd(std::span<const double>)>& eigs,
                                          const std::function<bool(const QuadraticFormBounds&)>& accept, double h0) {
  QuadraticFormBounds b;
  for (double h = h0;; h *= 0.5) {
    b = {INFINITY, -INFINITY, 0.0, h};
    for_each_sphere_point(d, h, [&](std::span<const double> x) {
      const Eigen::VectorXd e = eigs(x);
      b.min_sampled = std::min(b.min_sampled, e.minCoeff());
      b.max_sampled = std::max(b.max_sampled, e.maxCoeff());
    });
    if (d > 1) {
      const double K = std::max(std::abs(b.min_sampled), std::abs(b.max_sampled));
      b.margin = 2.0 * h * K / (1.0 - 2.0 * h);
    }
    if (d == 1 || accept(b) || sphere_point_count(d, 0.5 * h) > 2'000'000) return b;
  }
}

double xcoth_sq(double y) {
  y = std::max(y, 0.0);
  if (y < 1e-8) return 1.0 + y / 3.0 - y * y / 45.0 + 2.0 * y * y * y / 945.0;
  const double x = std::sqrt(y);
  return x / std::tanh(x);
}

double log_sinhc_sq(double y) {
  y = std::max(y, 0.0);
  if (y < 1e-8) return y / 6.0 - y * y / 180.0 + y * y * y / 2835.0;
  const double x = std::sqrt(y);
  if (x > 20.0) return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0 * x);
  return std::log(std::sinh(x) / x);
}

double coth_odd_sq(double y) {
  y = std::max(y, 0.0);
  if (y < 1e-8) return 1.0 / 3.0 - y / 45.0 + 2.0 * y * y / 945.0 - y * y * y / 4725.0;
  const double x = std::sqrt(y);
  return (1.0 / std::tanh(x) - 1.0 / x) / x;
}

}  // namespace speclab::num
