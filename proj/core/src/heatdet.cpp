#include "speclab/heatdet.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "speclab/errors.hpp"
#include "speclab/mellin.hpp"
#include "speclab/numerics.hpp"

namespace speclab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;
using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;
constexpr double kExpCut = 50.0;

struct Flat {
  LatticeForm lattice;
  double vol = 0.0;
  int n = 1;
};

Flat flat_of(const ModelOperator& model) {
  validate(model);
  const auto lat = lattice_form(model);
  require(lat.has_value(), ErrorCode::UnsupportedModel, "heat determinant needs a circle or flat torus");
  require(lat->dim() <= 2, ErrorCode::UnsupportedModel, "heat determinant supports dimensions 1 and 2");
  return {*lat, volume(model), lat->dim()};
}

double lambda_of(const Flat& f, const VectorXd& q) { return q.dot(f.lattice.G * q) + f.lattice.mass2; }

VectorXd shifted(const Flat& f, const VectorXi& k) { return k.cast<double>() + f.lattice.theta; }

double det2(const VectorXd& a, const VectorXd& b) { return a(0) * b(1) - a(1) * b(0); }

void require_time(double t) {
  require(std::isfinite(t) && t > 0.0, ErrorCode::InvalidArgument, "t must be positive");
}

}  // namespace

cplx correlator(const ModelOperator& model, const std::vector<VectorXi>& k, const std::vector<VectorXi>& l) {
  const Flat f = flat_of(model);
  require(k.size() == static_cast<size_t>(f.n) && l.size() == static_cast<size_t>(f.n), ErrorCode::InvalidArgument,
          "correlators take n upper and n lower mode labels");
  VectorXi balance = VectorXi::Zero(f.n);
  for (int i = 0; i < f.n; ++i) {
    require(k[static_cast<size_t>(i)].size() == f.n && l[static_cast<size_t>(i)].size() == f.n,
            ErrorCode::InvalidArgument, "mode labels need n components");
    balance += l[static_cast<size_t>(i)] - k[static_cast<size_t>(i)];
  }
  if (!balance.isZero()) return {0.0, 0.0};
  const double norm = std::pow(2.0 * kPi, f.n) / std::pow(f.vol, f.n);
  if (f.n == 1) return {0.0, shifted(f, l[0])(0) * norm};
  // (i q1) ^ (i q2) = -det(q1, q2) dx^1 ^ dx^2.
  return {-det2(shifted(f, l[0]), shifted(f, l[1])) * norm, 0.0};
}

std::vector<CorrelatorEntry> correlators(const ModelOperator& model, int cutoff) {
  const Flat f = flat_of(model);
  require(cutoff >= 0, ErrorCode::InvalidArgument, "cutoff must be non-negative");
  std::vector<CorrelatorEntry> out;
  if (f.n == 1) {
    for (int k = -cutoff; k <= cutoff; ++k) {
      const std::vector<VectorXi> idx{VectorXi::Constant(1, k)};
      const cplx v = correlator(model, idx, idx);
      if (v != cplx{}) out.push_back({idx, idx, v});
    }
    return out;
  }
  const long side = 2L * cutoff + 1;
  require(side * side * side * side * side * side <= 50'000'000L, ErrorCode::InvalidArgument,
          "cutoff too large for a full two-torus correlator table");
  auto label = [&](long code) {
    VectorXi v(2);
    v << static_cast<int>(code % side) - cutoff, static_cast<int>(code / side) - cutoff;
    return v;
  };
  const long cells = side * side;
  for (long a = 0; a < cells; ++a) {
    for (long b = 0; b < cells; ++b) {
      for (long c = 0; c < cells; ++c) {
        const VectorXi k1 = label(a), l1 = label(b), l2 = label(c);
        const VectorXi k2 = l1 + l2 - k1;
        if (k2.cwiseAbs().maxCoeff() > cutoff) continue;
        const std::vector<VectorXi> ks{k1, k2}, ls{l1, l2};
        const cplx v = correlator(model, ks, ls);
        if (v != cplx{}) out.push_back({ks, ls, v});
      }
    }
  }
  return out;
}

HeatDetResult heat_det(const ModelOperator& model, double t, long budget) {
  const Flat f = flat_of(model);
  require_time(t);
  require(budget > 0, ErrorCode::InvalidArgument, "budget must be positive");
  const auto& G = f.lattice.G;
  // Every mode in the sum is damped by exp(-t lambda) at least twice.
  const double radius2 = kExpCut / t;

  if (f.n == 1) {
    const double norm = std::pow(2.0 * kPi / f.vol, 2);
    num::CompensatedSum sum;
    long terms = 0;
    double abs_sum = 0.0;
    for_each_lattice_point(G, f.lattice.theta, radius2, [&](const VectorXd& q) {
      const double v = norm * q(0) * q(0) * std::exp(-2.0 * t * lambda_of(f, q));
      sum.add(v);
      abs_sum += v;
      ++terms;
    });
    return {sum.value(), 4e-16 * abs_sum, "spectral", terms};
  }

  // Momentum conservation k1 + k2 = l1 + l2 = P: tabulate
  // S(P) = sum_{k1} exp(-t (lambda(k1) + lambda(P - k1))) once per P.
  std::vector<VectorXi> modes;
  for_each_lattice_point(G, f.lattice.theta, radius2, [&](const VectorXd& q) {
    modes.push_back((q - f.lattice.theta).array().round().cast<int>().matrix());
  });
  const auto m = static_cast<long>(modes.size());
  const double work = static_cast<double>(m) * static_cast<double>(m) * 5.0;
  require(work <= static_cast<double>(budget), ErrorCode::TailTooLarge,
          "two-torus heat determinant needs " + std::to_string(static_cast<long>(work)) + " terms, above the budget");

  std::vector<double> weight(static_cast<size_t>(m));
  for (long i = 0; i < m; ++i) weight[static_cast<size_t>(i)] = std::exp(-t * lambda_of(f, shifted(f, modes[static_cast<size_t>(i)])));

  auto key = [](const VectorXi& p) { return std::pair{p(0), p(1)}; };
  std::map<std::pair<int, int>, double> S;
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < m; ++j) {
      const VectorXi P = modes[static_cast<size_t>(i)] + modes[static_cast<size_t>(j)];
      S[key(P)] += weight[static_cast<size_t>(i)] * weight[static_cast<size_t>(j)];
    }
  }
  const double norm = std::pow(2.0 * kPi / f.vol, 4);
  num::CompensatedSum sum;
  double abs_sum = 0.0;
  long terms = 0;
  for (long i = 0; i < m; ++i) {
    const VectorXd q1 = shifted(f, modes[static_cast<size_t>(i)]);
    for (long j = 0; j < m; ++j) {
      const VectorXd q2 = shifted(f, modes[static_cast<size_t>(j)]);
      const double d = det2(q1, q2);
      if (d == 0.0) continue;
      const VectorXi P = modes[static_cast<size_t>(i)] + modes[static_cast<size_t>(j)];
      const double v = 0.5 * norm * d * d * weight[static_cast<size_t>(i)] * weight[static_cast<size_t>(j)] * S.at(key(P));
      sum.add(v);
      abs_sum += v;
      ++terms;
    }
  }
  return {sum.value(), 1e-14 * abs_sum, "spectral", terms};
}

HeatDetResult heat_det_defining(const ModelOperator& model, double t, double rel_tol) {
  require_time(t);
  const auto* c = std::get_if<Circle>(&model);
  require(c != nullptr, ErrorCode::UnsupportedModel, "the defining integral is implemented for the circle");
  validate(model);
  require(c->twist - std::floor(c->twist) == 0.0, ErrorCode::UnsupportedModel,
          "the defining integral is implemented for the untwisted circle");
  const double L = 2.0 * kPi * c->radius;
  const double pref = 1.0 / std::sqrt(4.0 * kPi * t);
  const int images = static_cast<int>(std::ceil(std::sqrt(4.0 * t * kExpCut) / L)) + 1;
  // U(u) and -U''(u) from the image sum; integrand U(u) (-U''(u)) over one period.
  const std::function<double(double)> integrand = [&](double u) {
    double U = 0.0, mU2 = 0.0;
    for (int j = -images; j <= images; ++j) {
      const double w = u + j * L;
      const double g = pref * std::exp(-w * w / (4.0 * t));
      U += g;
      mU2 += g * (0.5 / t - w * w / (4.0 * t * t));
    }
    return U * mU2;
  };
  const auto est = num::integrate(integrand, 0.0, L, rel_tol);
  const double damp = std::exp(-2.0 * t * c->mass2);
  return {damp * L * est.value, damp * L * est.error, "defining-integral", 0};
}

double heat_det_order(int n) { return n * (n + 0.5); }

double heat_det_leading(int n, int N, double vol) {
  require(n >= 1 && N >= 1, ErrorCode::InvalidArgument, "n and N must be positive");
  require(std::isfinite(vol) && vol > 0.0, ErrorCode::InvalidArgument, "volume must be positive");
  return 0.5 * std::pow(N, n) * std::pow(4.0 * kPi, -static_cast<double>(n * n)) * std::pow(kPi / (2.0 * n), 0.5 * n) *
         vol;
}

AsymptoticSeries heat_det_fit(const ModelOperator& model, const std::vector<double>& times) {
  const Flat f = flat_of(model);
  const double order = heat_det_order(f.n);
  std::vector<FitSample> samples;
  for (double t : times) samples.push_back({t, heat_det(model, t).value * std::pow(t, order)});
  return expansion_fit(samples, {{0.0, 0}, {0.5, 0}, {1.0, 0}}, "t");
}

}  // namespace speclab
