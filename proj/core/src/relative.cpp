#include "speclab/relative.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "speclab/errors.hpp"
#include "speclab/mellin.hpp"
#include "speclab/numerics.hpp"

namespace speclab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;
// Mode sums keep terms down to exp(-kExpCut) relative to the leading one.
constexpr double kExpCut = 50.0;
// Direct mode sums are used once (t + s) times the smallest metric eigenvalue exceeds this.
constexpr double kDirectSwitch = 0.05;

// Shared Fourier description of a commuting pair: lambda_a(k) = (k+theta)^T G_a (k+theta) + m_a^2,
// and for Dirac pairs d_a(k) = e_a (k + theta).
struct Modes {
  int n = 1;
  MatrixXd G[2];
  double mass2[2] = {0.0, 0.0};
  VectorXd theta;
  bool dirac = false;
  double frame[2] = {1.0, 1.0};
  double c = 1.0;  // smallest eigenvalue of G+ and G-
};

double wrap(double x) { return x - std::floor(x); }

// Twist as given, reduced mod 1 only: folding theta -> -theta would relabel the modes.
VectorXd raw_twist(const ModelOperator& model) {
  if (const auto* c = std::get_if<Circle>(&model)) return VectorXd::Constant(1, wrap(c->twist));
  return std::get<FlatTorus>(model).twist.unaryExpr([](double x) { return wrap(x); });
}

Modes modes_of(const TracePair& pair) {
  validate(pair.plus);
  validate(pair.minus);
  require(std::isfinite(pair.mass) && pair.mass >= 0.0, ErrorCode::InvalidArgument, "mass must be non-negative");
  Modes m;
  const auto* dp = std::get_if<DiracCircle>(&pair.plus);
  const auto* dm = std::get_if<DiracCircle>(&pair.minus);
  if (dp || dm) {
    require(dp && dm, ErrorCode::NonCommutingPair, "a Dirac operator pairs only with a Dirac operator");
    require(wrap(dp->twist) == wrap(dm->twist), ErrorCode::NonCommutingPair, "Dirac pair needs equal twists");
    m.dirac = true;
    m.n = 1;
    m.frame[0] = dp->frame;
    m.frame[1] = dm->frame;
    m.G[0] = MatrixXd::Constant(1, 1, dp->frame * dp->frame);
    m.G[1] = MatrixXd::Constant(1, 1, dm->frame * dm->frame);
    m.theta = VectorXd::Constant(1, wrap(dp->twist));
  } else {
    const auto lp = lattice_form(pair.plus);
    const auto lm = lattice_form(pair.minus);
    require(lp && lm, ErrorCode::NonCommutingPair, "pair members need a shared Fourier eigenbasis");
    require(lp->dim() == lm->dim(), ErrorCode::NonCommutingPair, "pair members need equal dimension");
    require(raw_twist(pair.plus) == raw_twist(pair.minus), ErrorCode::NonCommutingPair,
            "pair members need equal twists");
    m.n = lp->dim();
    m.G[0] = lp->G;
    m.G[1] = lm->G;
    m.mass2[0] = lp->mass2;
    m.mass2[1] = lm->mass2;
    m.theta = raw_twist(pair.plus);
  }
  m.c = std::min(Eigen::SelfAdjointEigenSolver<MatrixXd>(m.G[0]).eigenvalues()(0),
                 Eigen::SelfAdjointEigenSolver<MatrixXd>(m.G[1]).eigenvalues()(0));
  return m;
}

void require_times(double t, double s) {
  require(std::isfinite(t) && t > 0.0 && std::isfinite(s) && s > 0.0, ErrorCode::InvalidArgument,
          "t and s must be positive");
}

struct ModeTerm {
  double lambda[2];
  double d[2];
};

// Visits every mode with c |k + theta|^2 <= radius2.
template <class F>
void for_each_mode(const Modes& m, double radius2, F&& f) {
  const MatrixXd iso = m.c * MatrixXd::Identity(m.n, m.n);
  for_each_lattice_point(iso, m.theta, radius2, [&](const VectorXd& q) {
    ModeTerm term{};
    for (int a = 0; a < 2; ++a) {
      term.lambda[a] = q.dot(m.G[a] * q) + m.mass2[a];
      term.d[a] = m.dirac ? m.frame[a] * q(0) : 0.0;
    }
    f(term);
  });
}

template <class F>
PairValue direct_sum(const Modes& m, double t, double s, F&& f) {
  num::CompensatedSum sum;
  double abs_sum = 0.0;
  for_each_mode(m, kExpCut / ((t + s) * m.c), [&](const ModeTerm& term) {
    const double v = f(term);
    sum.add(v);
    abs_sum += std::abs(v);
  });
  return {sum.value(), 4e-16 * abs_sum, "direct"};
}

// sum_k exp(-(k+theta)^T M (k+theta)) by Poisson summation.
PairValue gaussian_lattice(const MatrixXd& M, const VectorXd& theta) {
  const auto r = theta_trace(LatticeForm{M, theta, 0.0}, 1.0);
  return {r.value, r.error_bound, "theta"};
}

// sum_k (k+theta)^2 exp(-a (k+theta)^2) in one dimension by Poisson summation.
PairValue gaussian_moment(double a, double theta) {
  const double pref = std::sqrt(kPi / a);
  num::CompensatedSum sum;
  double abs_sum = 0.0;
  sum.add(0.5 / a);
  abs_sum += 0.5 / a;
  for (int j = 1;; ++j) {
    const double e = std::exp(-kPi * kPi * j * j / a);
    const double v = 2.0 * (0.5 / a - kPi * kPi * j * j / (a * a)) * e * std::cos(2.0 * kPi * j * theta);
    sum.add(v);
    abs_sum += std::abs(v);
    if (kPi * kPi * j * j / a > kExpCut) break;
  }
  return {pref * sum.value(), pref * 4e-16 * abs_sum, "theta"};
}

// X_ab(t, s) = Tr exp(-t L_a) exp(-s L_b).
PairValue x_ab(const Modes& m, int a, int b, double t, double s) {
  const MatrixXd M = t * m.G[a] + s * m.G[b];
  const double damp = std::exp(-t * m.mass2[a] - s * m.mass2[b]);
  if ((t + s) * m.c >= kDirectSwitch) {
    return direct_sum(m, t, s, [&](const ModeTerm& q) { return std::exp(-t * q.lambda[a] - s * q.lambda[b]); });
  }
  auto r = gaussian_lattice(M, m.theta);
  return {damp * r.value, damp * r.error_bound, r.method};
}

// Y_ab(t, s) = Tr D_a exp(-t D_a^2) D_b exp(-s D_b^2).
PairValue y_ab(const Modes& m, int a, int b, double t, double s) {
  if ((t + s) * m.c >= kDirectSwitch) {
    return direct_sum(m, t, s, [&](const ModeTerm& q) {
      return q.d[a] * q.d[b] * std::exp(-t * q.lambda[a] - s * q.lambda[b]);
    });
  }
  const double A = t * m.G[a](0, 0) + s * m.G[b](0, 0);
  auto r = gaussian_moment(A, m.theta(0));
  const double f = m.frame[a] * m.frame[b];
  return {f * r.value, std::abs(f) * r.error_bound, r.method};
}

template <class Single>
PairValue combine(Single&& single) {
  const PairValue pp = single(0, 0);
  const PairValue pm = single(0, 1);
  const PairValue mp = single(1, 0);
  const PairValue mm = single(1, 1);
  const double v = (pp.value - pm.value) - (mp.value - mm.value);
  const double scale = std::abs(pp.value) + std::abs(pm.value) + std::abs(mp.value) + std::abs(mm.value);
  return {v, pp.error_bound + pm.error_bound + mp.error_bound + mm.error_bound + 4e-16 * scale, pp.method};
}

PairValue psi_modes(const Modes& m, double t, double s) {
  if ((t + s) * m.c >= kDirectSwitch) {
    return direct_sum(m, t, s, [&](const ModeTerm& q) {
      return (std::exp(-t * q.lambda[0]) - std::exp(-t * q.lambda[1])) *
             (std::exp(-s * q.lambda[0]) - std::exp(-s * q.lambda[1]));
    });
  }
  return combine([&](int a, int b) { return x_ab(m, a, b, t, s); });
}

// Phi + mu2 Psi in one pass.
PairValue phi_modes(const Modes& m, double t, double s, double mu2) {
  if ((t + s) * m.c >= kDirectSwitch) {
    return direct_sum(m, t, s, [&](const ModeTerm& q) {
      const double ep_t = std::exp(-t * q.lambda[0]), em_t = std::exp(-t * q.lambda[1]);
      const double ep_s = std::exp(-s * q.lambda[0]), em_s = std::exp(-s * q.lambda[1]);
      return (q.d[0] * ep_t - q.d[1] * em_t) * (q.d[0] * ep_s - q.d[1] * em_s) + mu2 * (ep_t - em_t) * (ep_s - em_s);
    });
  }
  PairValue phi = combine([&](int a, int b) { return y_ab(m, a, b, t, s); });
  if (mu2 != 0.0) {
    const PairValue psi = combine([&](int a, int b) { return x_ab(m, a, b, t, s); });
    phi.value += mu2 * psi.value;
    phi.error_bound += mu2 * psi.error_bound;
  }
  return phi;
}

double occupation_fermi(double x) { return 1.0 / (std::exp(x) + 1.0); }
double occupation_bose(double x) { return 1.0 / std::expm1(x); }

PairValue bogolyubov_spectral(const Modes& m, double beta, double mass, Statistics stats) {
  const double m2 = mass * mass;
  // Every term decays at least like exp(-2 beta sqrt(lambda_min(k))).
  const double root = 25.0 / beta;
  num::CompensatedSum sum;
  double abs_sum = 0.0;
  for_each_mode(m, root * root, [&](const ModeTerm& q) {
    const double wp = std::sqrt(q.lambda[0] + m2), wm = std::sqrt(q.lambda[1] + m2);
    double v = 0.0;
    if (stats == Statistics::Bose) {
      v = (occupation_fermi(beta * wp) - occupation_fermi(beta * wm)) *
          (occupation_bose(beta * wp) - occupation_bose(beta * wm));
    } else {
      const double sp = std::sinh(beta * wp), sm = std::sinh(beta * wm);
      const double a = q.d[0] / sp - q.d[1] / sm;
      const double b = 1.0 / sp - 1.0 / sm;
      v = beta * beta * (a * a + m2 * b * b);
    }
    sum.add(v);
    abs_sum += std::abs(v);
  });
  return {sum.value(), 1e-15 * abs_sum + 1e-300, "spectral"};
}

class KernelCache {
 public:
  explicit KernelCache(KernelKind kind) : kind_(kind) {}
  double operator()(double t) {
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
    const double v = kernel_eval(kind_, t).value;
    cache_.emplace(t, v);
    return v;
  }

 private:
  KernelKind kind_;
  std::map<double, double> cache_;
};

PairValue bogolyubov_kernel(const Modes& m, double beta, double mass, Statistics stats, double rel_tol) {
  const double b2 = beta * beta;
  const double damp = mass * mass * b2;
  const double m2 = mass * mass;
  const bool bose = stats == Statistics::Bose;
  KernelCache outer_kernel(bose ? KernelKind::Fermi : KernelKind::Zero);
  KernelCache inner_kernel(bose ? KernelKind::Bose : KernelKind::Zero);
  double worst_inner = 0.0;
  auto outer = [&](double t) {
    const double ht = outer_kernel(t);
    if (ht == 0.0) return 0.0;
    auto inner = [&](double s) {
      const double hs = inner_kernel(s);
      if (hs == 0.0) return 0.0;
      const double r = bose ? psi_modes(m, b2 * t, b2 * s).value : phi_modes(m, b2 * t, b2 * s, m2).value;
      return hs * std::exp(-damp * s) * r;
    };
    const auto est = num::integrate_log_line(inner, 0.1 * rel_tol);
    worst_inner = std::max(worst_inner, est.error / std::max(std::abs(est.value), 1e-300));
    return ht * std::exp(-damp * t) * est.value;
  };
  const auto est = num::integrate_log_line(outer, rel_tol);
  // 1/sinh x = 2 sum_{k odd} exp(-k x): each h_0 factor carries a 2.
  const double scale = bose ? 1.0 : 4.0 * b2;
  const double value = scale * est.value;
  return {value, std::abs(scale) * est.error + worst_inner * std::abs(value), "kernel"};
}

}  // namespace

void validate(const TracePair& pair) { modes_of(pair); }

bool is_dirac_pair(const TracePair& pair) { return modes_of(pair).dirac; }

int dimension(const TracePair& pair) { return modes_of(pair).n; }

MatrixXd effective_metric(const TracePair& pair, double t, double s) {
  const Modes m = modes_of(pair);
  require_times(t, s);
  return (t * m.G[0] + s * m.G[1]).inverse();
}

PairValue combined_trace_X(const TracePair& pair, double t, double s) {
  const Modes m = modes_of(pair);
  require_times(t, s);
  return x_ab(m, 0, 1, t, s);
}

PairValue combined_trace_Y(const TracePair& pair, double t, double s) {
  const Modes m = modes_of(pair);
  require(m.dirac, ErrorCode::UnsupportedModel, "Y needs a Dirac pair");
  require_times(t, s);
  return y_ab(m, 0, 1, t, s);
}

PairValue relative_psi(const TracePair& pair, double t, double s) {
  const Modes m = modes_of(pair);
  require_times(t, s);
  return psi_modes(m, t, s);
}

PairValue relative_phi(const TracePair& pair, double t, double s) {
  const Modes m = modes_of(pair);
  require(m.dirac, ErrorCode::UnsupportedModel, "Phi needs a Dirac pair");
  require_times(t, s);
  return phi_modes(m, t, s, 0.0);
}

double theorem1_predicted(const TracePair& pair, double t, double s, CombinedTrace which) {
  const Modes m = modes_of(pair);
  require_times(t, s);
  const MatrixXd g = (t * m.G[0] + s * m.G[1]).inverse();
  const double vol = std::pow(2.0 * kPi, m.n);
  const double root_g = std::sqrt(g.determinant());
  if (which == CombinedTrace::X) return vol * root_g;
  require(m.dirac, ErrorCode::UnsupportedModel, "Y needs a Dirac pair");
  return vol * 0.5 * root_g * m.frame[0] * g(0, 0) * m.frame[1];
}

Theorem1Fit theorem1_leading_fit(const TracePair& pair, double t, double s, const std::vector<double>& epsilons,
                                 CombinedTrace which) {
  const Modes m = modes_of(pair);
  require_times(t, s);
  require(epsilons.size() >= 4, ErrorCode::InvalidArgument, "need at least four epsilon samples");
  std::vector<FitSample> samples;
  for (double eps : epsilons) {
    require(std::isfinite(eps) && eps > 0.0, ErrorCode::InvalidArgument, "epsilons must be positive");
    const double norm = std::pow(4.0 * kPi * eps, 0.5 * m.n);
    const double v = which == CombinedTrace::X ? combined_trace_X(pair, eps * t, eps * s).value
                                               : eps * combined_trace_Y(pair, eps * t, eps * s).value;
    samples.push_back({eps, norm * v});
  }
  Theorem1Fit out;
  out.series = expansion_fit(samples, {{0.0, 0}, {1.0, 0}, {2.0, 0}}, "eps");
  out.fitted = out.series.coefficient(0.0);
  out.predicted = theorem1_predicted(pair, t, s, which);
  return out;
}

std::string to_string(BogolyubovMethod m) { return m == BogolyubovMethod::Spectral ? "spectral" : "kernel"; }

BogolyubovMethod bogolyubov_method_from_string(const std::string& s) {
  if (s == "spectral") return BogolyubovMethod::Spectral;
  if (s == "kernel") return BogolyubovMethod::Kernel;
  fail(ErrorCode::InvalidArgument, "unknown Bogolyubov method '" + s + "'");
}

PairValue bogolyubov(const TracePair& pair, double beta, Statistics stats, BogolyubovMethod method, double rel_tol) {
  const Modes m = modes_of(pair);
  require(std::isfinite(beta) && beta > 0.0, ErrorCode::InvalidArgument, "beta must be positive");
  require(pair.mass > 0.0, ErrorCode::InvalidArgument, "Bogolyubov invariants need a positive mass");
  require(stats == Statistics::Bose || stats == Statistics::Fermi, ErrorCode::InvalidArgument,
          "statistics must be bose or fermi");
  require(stats == Statistics::Bose || m.dirac, ErrorCode::UnsupportedModel,
          "the fermionic invariant needs a Dirac pair");
  require(rel_tol >= 1e-14, ErrorCode::InvalidArgument, "rel_tol must be at least 1e-14");
  if (method == BogolyubovMethod::Spectral) return bogolyubov_spectral(m, beta, pair.mass, stats);
  return bogolyubov_kernel(m, beta, pair.mass, stats, rel_tol);
}

ExponentFit bogolyubov_exponent_fit(const TracePair& pair, const std::vector<double>& betas, Statistics stats,
                                    BogolyubovMethod method) {
  const int n = dimension(pair);
  require(betas.size() >= 6, ErrorCode::InvalidArgument, "need at least six beta samples");
  const auto k = static_cast<Eigen::Index>(betas.size());
  VectorXd b(k), v(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    b(i) = betas[static_cast<size_t>(i)];
    v(i) = bogolyubov(pair, b(i), stats, method).value;
  }
  const auto solve = [&](double p) {
    MatrixXd A(k, 4);
    for (Eigen::Index i = 0; i < k; ++i) A.row(i) << std::pow(b(i), p), 1.0, b(i), b(i) * b(i);
    const VectorXd c = A.colPivHouseholderQr().solve(v);
    return std::pair{c, (A * c - v).norm() / v.norm()};
  };
  const auto [p, r] = boost::math::tools::brent_find_minima([&](double q) { return solve(q).second; },
                                                            -n - 1.0, -0.25, 40);
  const auto best = solve(p);
  return {p, best.first(0), r};
}

}  // namespace speclab
