#include "speclab/traces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "speclab/errors.hpp"
#include "speclab/numerics.hpp"

namespace speclab {

namespace {

constexpr double kPi = std::numbers::pi;
// exp(-46) ~ 1e-20: dual and direct lattice sums are cut where terms drop below this.
constexpr double kExpCut = 46.0;

double inv_sqrt_4pi() { return 0.5 / std::sqrt(kPi); }

void require_time(double t, const char* what) {
  require(std::isfinite(t) && t > 0.0, ErrorCode::InvalidArgument, std::string(what) + " must be positive");
}

CountingBound dual_bound(const Eigen::MatrixXd& Ginv) {
  const int n = static_cast<int>(Ginv.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ginv);
  const double lmin = es.eigenvalues().minCoeff();
  const double ball = std::pow(kPi, 0.5 * n) / boost::math::tgamma(0.5 * n + 1.0);
  return {n, ball * std::pow(lmin, -0.5 * n), 0.5 * std::sqrt(n * lmin)};
}

// Exact small-time representation for intervals with Dirichlet/Neumann ends.
std::optional<TraceResult> interval_theta(const Interval& m, double t) {
  using K = BC::Kind;
  if (m.left.kind == K::Robin || m.right.kind == K::Robin) return std::nullopt;
  const bool dl = m.left.kind == K::Dirichlet;
  const bool dr = m.right.kind == K::Dirichlet;
  const double L = m.length;
  const double pref = L / (2.0 * std::sqrt(kPi * t));
  const double sign = (dl == dr) ? 1.0 : -1.0;
  num::CompensatedSum s;
  const int jmax = static_cast<int>(std::ceil(std::sqrt(kExpCut * t) / L)) + 1;
  for (int j = jmax; j >= 1; --j) s.add(2.0 * std::pow(sign, j) * std::exp(-j * j * L * L / t));
  s.add(1.0);
  double constant = 0.0;
  if (dl == dr) constant = dl ? -0.5 : 0.5;
  const double value = pref * s.value() + constant;
  const double tail = pref * 2.0 * std::exp(-(jmax + 1.0) * (jmax + 1.0) * L * L / t) * 2.0;
  return TraceResult{value, tail + 4e-16 * (std::abs(pref) + std::abs(constant)), "theta"};
}

double min_time_for_auto(const ModelOperator& model) {
  if (auto lat = lattice_form(model)) {
    return kPi * std::pow(lat->G.determinant(), -1.0 / lat->dim());
  }
  if (const auto* i = std::get_if<Interval>(&model)) {
    if (i->left.kind != BC::Kind::Robin && i->right.kind != BC::Kind::Robin) return i->length * i->length;
  }
  return 1e-2;
}

}  // namespace

std::string to_string(Statistics s) {
  switch (s) {
    case Statistics::Boltzmann: return "boltzmann";
    case Statistics::Relativistic: return "relativistic";
    case Statistics::Bose: return "bose";
    case Statistics::Fermi: return "fermi";
  }
  return "bose";
}

Statistics statistics_from_string(const std::string& s) {
  if (s == "boltzmann") return Statistics::Boltzmann;
  if (s == "relativistic") return Statistics::Relativistic;
  if (s == "bose") return Statistics::Bose;
  if (s == "fermi") return Statistics::Fermi;
  fail(ErrorCode::InvalidArgument, "unknown statistics '" + s + "'");
}

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Fermi: return "h_f";
    case KernelKind::Bose: return "h_b";
    case KernelKind::Zero: return "h_0";
  }
  return "h_b";
}

TraceResult classical_trace(const Spectrum& spec, double t, double rel_tol) {
  require_time(t, "t");
  require(spec.complete_below_cutoff, ErrorCode::InvalidArgument, "spectrum must be complete below its cutoff");
  num::CompensatedSum sum;
  double abs_sum = 0.0;
  for (auto it = spec.entries.rbegin(); it != spec.entries.rend(); ++it) {
    const double term = it->multiplicity * std::exp(-t * it->lambda);
    sum.add(term);
    abs_sum += std::abs(term);
  }
  const double value = sum.value();
  double tail = 0.0;
  if (spec.tail.coeff > 0.0) {
    tail = num::weyl_tail_bound(spec.tail.dim, spec.tail.coeff, spec.tail.offset, spec.cutoff, t);
    if (tail > rel_tol * std::abs(value)) {
      fail(ErrorCode::TailTooLarge, "tail bound " + std::to_string(tail) + " at t=" + std::to_string(t) +
                                        " exceeds tolerance; raise the cutoff (" + std::to_string(spec.cutoff) + ")");
    }
  }
  return {value, tail + 2e-16 * abs_sum, "direct"};
}

TraceResult theta_trace(const LatticeForm& f, double t) {
  require_time(t, "t");
  const int n = f.dim();
  const Eigen::MatrixXd Ginv = f.G.inverse();
  const double a = kPi * kPi / t;
  const double radius2 = kExpCut / a;
  const double pref = std::exp(-t * f.mass2) * std::pow(kPi / t, 0.5 * n) / std::sqrt(f.G.determinant());
  num::CompensatedSum sum;
  double abs_sum = 0.0;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  for_each_lattice_point(Ginv, zero, radius2, [&](const Eigen::VectorXd& j) {
    const double term = std::exp(-a * j.dot(Ginv * j)) * std::cos(2.0 * kPi * j.dot(f.theta));
    sum.add(term);
    abs_sum += std::abs(term);
  });
  const auto b = dual_bound(Ginv);
  const double tail = num::weyl_tail_bound(n, b.coeff, b.offset, radius2, a);
  return {pref * sum.value(), pref * (tail + 2e-16 * abs_sum), "theta"};
}

double heat_cutoff(const ModelOperator& model, double t, double rel_tol) {
  require_time(t, "t");
  const auto bound = counting_bound(model);
  double cutoff = 16.0 / t;
  if (auto lat = lattice_form(model)) cutoff += lat->mass2;
  for (int iter = 0; iter < 60; ++iter, cutoff *= 2.0) {
    Spectrum spec;
    try {
      spec = eigenvalues(model, cutoff);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CutoffTooSmall) continue;
      throw;
    }
    double s = 0.0;
    for (const auto& e : spec.entries) s += e.multiplicity * std::exp(-t * e.lambda);
    const double tail = num::weyl_tail_bound(bound.dim, bound.coeff, bound.offset, cutoff, t);
    if (tail <= rel_tol * s) return cutoff;
  }
  fail(ErrorCode::TailTooLarge, "no admissible cutoff found for t=" + std::to_string(t));
}

double sqrt_cutoff(const ModelOperator& model, double beta, double rel_tol) {
  require_time(beta, "beta");
  const auto bound = counting_bound(model);
  double cutoff = 256.0 / (beta * beta);
  if (auto lat = lattice_form(model)) cutoff += lat->mass2;
  for (int iter = 0; iter < 60; ++iter, cutoff *= 2.0) {
    Spectrum spec;
    try {
      spec = eigenvalues(model, cutoff);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::CutoffTooSmall) continue;
      throw;
    }
    double s = 0.0;
    for (const auto& e : spec.entries) s += e.multiplicity * std::exp(-beta * std::sqrt(std::max(e.lambda, 0.0)));
    const double tail = num::weyl_tail_bound_sqrt(bound.dim, bound.coeff, bound.offset, cutoff, beta);
    if (tail <= rel_tol * s) return cutoff;
  }
  fail(ErrorCode::TailTooLarge, "no admissible cutoff found for beta=" + std::to_string(beta));
}

HeatTrace::HeatTrace(const ModelOperator& model, double cutoff) {
  validate(model);
  theta_switch_ = min_time_for_auto(model);
  if (!(cutoff > 0.0)) cutoff = heat_cutoff(model, theta_switch_);
  spec_ = eigenvalues(model, cutoff);
  lattice_ = lattice_form(model);
  if (const auto* i = std::get_if<Interval>(&model); i && interval_theta(*i, 1.0)) interval_ = *i;
  if (!lattice_ && !interval_) theta_switch_ = 0.0;
}

HeatTrace::HeatTrace(Spectrum spec) : spec_(std::move(spec)) {}

TraceResult HeatTrace::operator()(double t, TraceMethod method) const {
  require_time(t, "t");
  const bool has_dual = lattice_.has_value() || interval_.has_value();
  const auto dual = [&]() -> TraceResult {
    if (lattice_) return theta_trace(*lattice_, t);
    return *interval_theta(*interval_, t);
  };
  switch (method) {
    case TraceMethod::Theta:
      require(has_dual, ErrorCode::UnsupportedModel, "theta path needs a lattice or Dirichlet/Neumann interval model");
      return dual();
    case TraceMethod::Direct:
      return classical_trace(spec_, t);
    case TraceMethod::Auto:
      break;
  }
  if (has_dual && t < theta_switch_) return dual();
  try {
    return classical_trace(spec_, t);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TailTooLarge && has_dual) return dual();
    throw;
  }
}

TraceResult relativistic_trace(const HeatTrace& trace, double beta, SumPath path) {
  require_time(beta, "beta");
  const auto& spec = trace.spectrum();
  require(spec.lambda_min() >= 0.0, ErrorCode::NonPositiveOperator, "negative eigenvalue in relativistic trace");
  if (path == SumPath::Direct) {
    num::CompensatedSum sum;
    double abs_sum = 0.0;
    for (auto it = spec.entries.rbegin(); it != spec.entries.rend(); ++it) {
      const double term = it->multiplicity * std::exp(-beta * std::sqrt(it->lambda));
      sum.add(term);
      abs_sum += term;
    }
    double tail = 0.0;
    if (spec.tail.coeff > 0.0) {
      tail = num::weyl_tail_bound_sqrt(spec.tail.dim, spec.tail.coeff, spec.tail.offset, spec.cutoff, beta);
      if (tail > 1e-12 * sum.value()) {
        fail(ErrorCode::TailTooLarge, "relativistic tail bound " + std::to_string(tail) + " too large at beta=" +
                                          std::to_string(beta) + "; raise the cutoff");
      }
    }
    return {sum.value(), tail + 2e-16 * abs_sum, "direct"};
  }
  const double zero = spec.zero_multiplicity();
  const double b2 = beta * beta;
  double theta_err = 0.0;
  auto f = [&](double t) {
    const auto th = trace(t * b2);
    theta_err = std::max(theta_err, th.error_bound);
    return inv_sqrt_4pi() * std::pow(t, -1.5) * std::exp(-0.25 / t) * (th.value - zero);
  };
  const auto est = num::integrate_log_line(f, 1e-12);
  return {zero + est.value, est.error + theta_err + 1e-15 * std::abs(zero + est.value), "subordination"};
}

KernelValue kernel_eval(KernelKind kind, double t, double beta_mu) {
  require_time(t, "t");
  require(std::isfinite(beta_mu), ErrorCode::InvalidArgument, "beta*mu must be finite");
  using ld = long double;
  const ld tt = t;
  const ld c = (kind == KernelKind::Zero) ? 0.0L : static_cast<ld>(beta_mu);
  const ld peak = tt * c + std::sqrt(tt * tt * c * c + 2.0L * tt);
  const auto term = [&](long k) {
    const ld kk = static_cast<ld>(k);
    return kk * std::exp(-kk * kk / (4.0L * tt) + kk * c);
  };
  ld sum = 0.0L;
  ld comp = 0.0L;
  const auto add = [&](ld x) {
    const ld y = x - comp;
    const ld s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  };
  int terms = 0;
  constexpr long kMaxTerms = 50'000'000;
  if (kind == KernelKind::Zero) {
    for (long k = 1; k < kMaxTerms; k += 2) {
      const ld v = term(k);
      add(v);
      ++terms;
      if (k > peak && v <= 1e-19L * std::abs(sum)) break;
    }
  } else if (kind == KernelKind::Bose) {
    for (long k = 1; k < kMaxTerms; ++k) {
      const ld v = term(k);
      add(v);
      ++terms;
      if (k > peak && v <= 1e-19L * std::abs(sum)) break;
    }
  } else {
    for (long k = 1; k < kMaxTerms; k += 2) {
      const ld v = term(k) - term(k + 1);
      add(v);
      terms += 2;
      if (k > peak && std::abs(v) <= 1e-19L * std::abs(sum)) break;
    }
  }
  const ld pref = static_cast<ld>(inv_sqrt_4pi()) * std::pow(tt, -1.5L);
  return {static_cast<double>(pref * sum), terms};
}

TraceResult quantum_trace(const HeatTrace& trace, double beta, double mu, Statistics stats, SumPath path) {
  require_time(beta, "beta");
  require(std::isfinite(mu), ErrorCode::InvalidArgument, "mu must be finite");
  const auto& spec = trace.spectrum();
  if (stats == Statistics::Boltzmann || stats == Statistics::Relativistic) {
    auto r = relativistic_trace(trace, beta, path);
    const double f = std::exp(beta * mu);
    return {f * r.value, f * r.error_bound, r.method};
  }
  const double lmin = spec.lambda_min();
  require(lmin > 0.0, ErrorCode::NonPositiveOperator, "quantum traces need a strictly positive operator");
  const double hmin = std::sqrt(lmin);
  if (stats == Statistics::Bose) {
    require(mu < hmin, ErrorCode::BoseDivergence,
            "mu=" + std::to_string(mu) + " is not below sqrt(lambda_min)=" + std::to_string(hmin));
  }
  const double sign = stats == Statistics::Bose ? -1.0 : 1.0;
  if (path == SumPath::Direct) {
    num::CompensatedSum sum;
    double abs_sum = 0.0;
    for (auto it = spec.entries.rbegin(); it != spec.entries.rend(); ++it) {
      const double x = beta * (std::sqrt(it->lambda) - mu);
      const double term = it->multiplicity / (sign > 0 ? std::exp(x) + 1.0 : std::expm1(x));
      sum.add(term);
      abs_sum += std::abs(term);
    }
    double tail = 0.0;
    if (spec.tail.coeff > 0.0) {
      const double x_cut = beta * (std::sqrt(spec.cutoff) - mu);
      require(x_cut > 0.0, ErrorCode::TailTooLarge, "cutoff below chemical potential");
      const double occupation = sign > 0 ? 1.0 : 1.0 / (1.0 - std::exp(-x_cut));
      tail = std::exp(beta * mu) * occupation *
             num::weyl_tail_bound_sqrt(spec.tail.dim, spec.tail.coeff, spec.tail.offset, spec.cutoff, beta);
      if (tail > 1e-12 * std::abs(sum.value())) {
        fail(ErrorCode::TailTooLarge, "quantum trace tail bound " + std::to_string(tail) + " too large");
      }
    }
    return {sum.value(), tail + 2e-16 * abs_sum, "direct"};
  }
  if (mu >= hmin) {
    fail(ErrorCode::QuadratureFailure,
         "kernel representation needs mu < sqrt(lambda_min); the series is not summable otherwise");
  }
  const KernelKind kind = stats == Statistics::Bose ? KernelKind::Bose : KernelKind::Fermi;
  const double b2 = beta * beta;
  double theta_err = 0.0;
  auto f = [&](double t) {
    const double h = kernel_eval(kind, t, beta * mu).value;
    if (h == 0.0) return 0.0;
    const auto th = trace(t * b2);
    theta_err = std::max(theta_err, th.error_bound / std::max(std::abs(th.value), 1e-300));
    return h * th.value;
  };
  const auto est = num::integrate_log_line(f, 1e-11);
  return {est.value, est.error + theta_err * std::abs(est.value), "kernel"};
}

}  // namespace speclab
