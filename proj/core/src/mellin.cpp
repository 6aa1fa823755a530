#include "speclab/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "speclab/errors.hpp"
#include "speclab/numerics.hpp"
#include "speclab/traces.hpp"

namespace speclab {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_nonnegative_integer(double x, int& k) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-12 || r < 0.0) return false;
  k = static_cast<int>(r);
  return true;
}

double factorial(int j) { return boost::math::factorial<double>(static_cast<unsigned>(j)); }

/// Power expansion and exact remainder of exp(t shift) * (Theta(t) - excluded zero modes)
/// on (0, 1], truncated after `order` terms per family.
struct ShiftedExpansion {
  std::map<double, double> terms;  // power -> coefficient
  std::function<double(double)> remainder;
  int dim = 0;
};

ShiftedExpansion shifted_expansion(const SmallTimeForm& form, const SpectralQuery& query, int order) {
  ShiftedExpansion out;
  out.dim = form.dim;
  const double d = form.decay - query.shift;
  const double z = query.exclude_zero_modes ? form.zero_modes : 0.0;
  const auto add = [&](double p, double c) {
    if (c == 0.0) return;
    for (auto& [q, v] : out.terms) {
      if (std::abs(q - p) < 1e-12) {
        v += c;
        return;
      }
    }
    out.terms.emplace(p, c);
  };
  for (const auto& [p, c] : form.terms) {
    for (int j = 0; j < order; ++j) add(p + j, c * std::pow(-d, j) / factorial(j));
  }
  if (z != 0.0) {
    for (int j = 0; j < order; ++j) add(j, -z * std::pow(query.shift, j) / factorial(j));
  }
  const auto terms = form.terms;
  const auto rem = form.remainder;
  const double shift = query.shift;
  out.remainder = [terms, rem, d, z, shift, order](double t) {
    num::CompensatedSum s;
    for (const auto& [p, c] : terms) s.add(c * std::pow(t, p) * num::exp_tail(-t * d, order));
    s.add(std::exp(-t * d) * rem(t));
    if (z != 0.0) s.add(-z * num::exp_tail(t * shift, order));
    return s.value();
  };
  return out;
}

/// Large-time data: the spectrum used for t >= 1 with zero modes removed on request.
struct LargeTime {
  Spectrum spec;
  double lambda_min = 0.0;
};

LargeTime large_time(const ModelOperator& model, const SpectralQuery& query) {
  LargeTime lt;
  Spectrum spec = eigenvalues(model, heat_cutoff(model, 1.0, 1e-17));
  if (query.exclude_zero_modes) spec = spec.without_zero_modes();
  require(!spec.empty(), ErrorCode::NonPositiveOperator, "spectrum is empty after removing zero modes");
  lt.lambda_min = spec.lambda_min();
  if (query.shift == 0.0) {
    require(lt.lambda_min > 0.0, ErrorCode::NonPositiveOperator,
            "operator has a non-positive eigenvalue " + std::to_string(lt.lambda_min) +
                "; exclude zero modes or add a mass");
  } else {
    require(lt.lambda_min - query.shift > 0.0, ErrorCode::NonPositiveShiftedOperator,
            "shift " + std::to_string(query.shift) + " is not below the smallest eigenvalue " +
                std::to_string(lt.lambda_min));
  }
  lt.spec = std::move(spec);
  return lt;
}

struct MellinParts {
  cplx small;  // int_0^1 t^{a-1} R(t)
  cplx large;  // int_1^inf t^{a-1} Theta(t)
  double error = 0.0;
};

MellinParts mellin_integrals(const ShiftedExpansion& ex, const LargeTime& lt, const SpectralQuery& query, cplx a) {
  MellinParts parts;
  const auto small = num::integrate(
      std::function<cplx(double)>([&](double t) { return std::pow(t, a - 1.0) * ex.remainder(t); }), 0.0, 1.0,
      1e-13, 1e-16);
  const double mu = lt.lambda_min - query.shift;
  const double t_end = 1.0 + (60.0 + std::max(0.0, std::abs(a.real()) * 8.0)) / mu;
  const auto& spec = lt.spec;
  const auto large = num::integrate(
      std::function<cplx(double)>([&](double t) {
        num::CompensatedSum s;
        for (auto it = spec.entries.rbegin(); it != spec.entries.rend(); ++it) {
          s.add(it->multiplicity * std::exp(-t * (it->lambda - query.shift)));
        }
        return std::pow(t, a - 1.0) * s.value();
      }),
      1.0, t_end, 1e-13, 1e-16);
  parts.small = small.value;
  parts.large = large.value;
  parts.error = small.error + large.error;
  return parts;
}

int order_for(double re_q, int dim) { return static_cast<int>(std::ceil(re_q + 0.5 * dim)) + 1; }

}  // namespace

SmallTimeForm small_time_form(const ModelOperator& model) {
  validate(model);
  SmallTimeForm form;
  form.dim = dimension(model);
  if (auto lat = lattice_form(model)) {
    const int n = lat->dim();
    const Eigen::MatrixXd Ginv = lat->G.inverse();
    const double c = std::pow(kPi, 0.5 * n) / std::sqrt(lat->G.determinant());
    form.decay = lat->mass2;
    form.terms = {{-0.5 * n, c}};
    const bool integral_twist = lat->theta.cwiseAbs().maxCoeff() < 1e-15;
    form.zero_modes = (lat->mass2 == 0.0 && integral_twist) ? 1.0 : 0.0;
    const Eigen::VectorXd theta = lat->theta;
    form.remainder = [Ginv, theta, c, n](double t) {
      const double a = kPi * kPi / t;
      num::CompensatedSum s;
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
      for_each_lattice_point(Ginv, zero, 46.0 / a, [&](const Eigen::VectorXd& j) {
        if (j.squaredNorm() == 0.0) return;
        s.add(std::exp(-a * j.dot(Ginv * j)) * std::cos(2.0 * kPi * j.dot(theta)));
      });
      return c * std::pow(t, -0.5 * n) * s.value();
    };
    return form;
  }
  if (const auto* iv = std::get_if<Interval>(&model)) {
    using K = BC::Kind;
    require(iv->left.kind != K::Robin && iv->right.kind != K::Robin, ErrorCode::UnsupportedModel,
            "Robin intervals have no exact small-time form");
    const bool dl = iv->left.kind == K::Dirichlet;
    const bool dr = iv->right.kind == K::Dirichlet;
    const double L = iv->length;
    const double lead = L / (2.0 * std::sqrt(kPi));
    form.terms = {{-0.5, lead}};
    if (dl == dr) form.terms.emplace_back(0.0, dl ? -0.5 : 0.5);
    form.zero_modes = (!dl && !dr) ? 1.0 : 0.0;
    const double sign = dl == dr ? 1.0 : -1.0;
    form.remainder = [L, lead, sign](double t) {
      num::CompensatedSum s;
      const int jmax = static_cast<int>(std::ceil(std::sqrt(46.0 * t) / L)) + 1;
      for (int j = jmax; j >= 1; --j) s.add(2.0 * std::pow(sign, j) * std::exp(-j * j * L * L / t));
      return lead / std::sqrt(t) * s.value();
    };
    return form;
  }
  fail(ErrorCode::UnsupportedModel, model_name(model) + " has no exact small-time heat trace form");
}

AqResult a_q(const ModelOperator& model, cplx q, int series_order, const SpectralQuery& query) {
  require(std::isfinite(q.real()) && std::isfinite(q.imag()), ErrorCode::InvalidArgument, "q must be finite");
  const auto form = small_time_form(model);
  const int n = form.dim;
  const int needed = order_for(q.real(), n);
  require(series_order >= needed, ErrorCode::InsufficientOrder,
          "series_order " + std::to_string(series_order) + " < " + std::to_string(needed) +
              " leaves a divergent small-time remainder");
  const auto lt = large_time(model, query);
  const auto ex = shifted_expansion(form, query, series_order);
  const cplx a = 0.5 * n - q;
  const cplx rg = num::rgamma(-q);
  cplx poles = 0.0;
  for (const auto& [p, c] : ex.terms) {
    int k = 0;
    if (is_nonnegative_integer(0.5 * n + p, k)) {
      poles += c * num::rgamma_div(-q, k);
    } else {
      const cplx den = a + p;
      require(std::abs(den) > 0.0, ErrorCode::PoleOfZeta, "A_q is singular here once zero modes are removed");
      poles += c * rg / den;
    }
  }
  const auto parts = mellin_integrals(ex, lt, query, a);
  const double norm = std::pow(4.0 * kPi, 0.5 * n);
  AqResult r;
  r.q = q;
  r.value = norm * (poles + rg * (parts.small + parts.large));
  r.error = norm * (std::abs(rg) * parts.error + 1e-15 * std::abs(poles)) + 1e-15 * std::abs(r.value);
  r.split_point = 1.0;
  return r;
}

double standard_coefficient(const ModelOperator& model, int k) {
  require(k >= 0, ErrorCode::InvalidArgument, "k must be non-negative");
  const int n = dimension(model);
  const auto r = a_q(model, cplx(k, 0.0), order_for(k, n));
  return std::pow(-1.0, k) / factorial(k) * r.value.real();
}

double a_q_derivative(const ModelOperator& model, double q, int series_order) {
  constexpr double h = 1e-20;
  return a_q(model, cplx(q, h), series_order).value.imag() / h;
}

namespace {

ZetaResult zeta_continuation(const ModelOperator& model, cplx s, const SpectralQuery& query) {
  const auto form = small_time_form(model);
  const int n = form.dim;
  const int order = std::max(2, static_cast<int>(std::ceil(0.5 * n - s.real())) + 2);
  const auto lt = large_time(model, query);
  const auto ex = shifted_expansion(form, query, order);
  const cplx rg = num::rgamma(s);
  cplx poles = 0.0;
  for (const auto& [p, c] : ex.terms) {
    int k = 0;
    if (is_nonnegative_integer(p, k)) {
      poles += c * num::rgamma_div(s, k);
    } else {
      const cplx den = s + p;
      if (std::abs(den) < 1e-14) {
        fail(ErrorCode::PoleOfZeta, "zeta has a pole at s = " + std::to_string(-p) + " with residue " +
                                        std::to_string(c * std::abs(rg)));
      }
      poles += c * rg / den;
    }
  }
  const auto parts = mellin_integrals(ex, lt, query, s);
  ZetaResult r;
  r.value = poles + rg * (parts.small + parts.large);
  r.error = std::abs(rg) * parts.error + 1e-15 * (std::abs(poles) + std::abs(r.value));
  r.method = "continuation";
  return r;
}

double default_direct_cutoff(int n) {
  if (n == 1) return 1e10;
  if (n == 2) return 1e5;
  return 1e4;
}

ZetaResult zeta_direct(const ModelOperator& model, cplx s, const SpectralQuery& query, double cutoff) {
  const int n = dimension(model);
  require(s.real() > 0.5 * n, ErrorCode::InvalidArgument, "direct zeta summation needs Re s > n/2");
  if (!(cutoff > 0.0)) cutoff = default_direct_cutoff(n);
  const Spectrum wide = eigenvalues(model, 1.05 * cutoff);
  num::CompensatedSum re;
  num::CompensatedSum im;
  double last = -1.0;
  double next = -1.0;
  for (auto it = wide.entries.rbegin(); it != wide.entries.rend(); ++it) {
    if (it->lambda > cutoff) {
      next = it->lambda;
      continue;
    }
    last = std::max(last, it->lambda);
    if (query.exclude_zero_modes && it->lambda == 0.0) continue;
    const double mu = it->lambda - query.shift;
    require(mu > 0.0, query.shift == 0.0 ? ErrorCode::NonPositiveOperator : ErrorCode::NonPositiveShiftedOperator,
            "non-positive (shifted) eigenvalue in zeta sum");
    const cplx v = it->multiplicity * std::exp(-s * std::log(mu));
    re.add(v.real());
    im.add(v.imag());
  }
  require(next > 0.0, ErrorCode::CutoffTooSmall, "no eigenvalue beyond the direct cutoff");
  const double start = std::pow(0.5 * (std::sqrt(std::max(last, 0.0)) + std::sqrt(next)), 2.0);
  const double ball = std::pow(kPi, 0.5 * n) / boost::math::tgamma(0.5 * n + 1.0);
  const double weyl = (wide.per_unit_volume ? 1.0 : volume(model)) * ball / std::pow(2.0 * kPi, n);
  // Weyl-law tail: sum_j (s)_j/j! shift^j C (n/2) start^{n/2-s-j}/(s+j-n/2).
  cplx tail = 0.0;
  cplx poch = 1.0;
  for (int j = 0; j < 200; ++j) {
    if (j > 0) poch *= (s + double(j - 1)) / double(j);
    const cplx term = poch * std::pow(query.shift, j) * weyl * (0.5 * n) *
                      std::exp((0.5 * n - s - double(j)) * std::log(start)) / (s + double(j) - 0.5 * n);
    tail += term;
    if (std::abs(term) <= 1e-17 * std::abs(tail)) break;
  }
  ZetaResult r;
  r.value = cplx(re.value(), im.value()) + tail;
  // Next-order estimate of the lattice-point remainder beyond the Weyl term.
  r.error = std::abs(s) * weyl * std::pow(start, 0.5 * (n - 1) - s.real() - 0.5) + 1e-15 * std::abs(r.value);
  r.method = "direct";
  return r;
}

}  // namespace

ZetaResult zeta(const ModelOperator& model, cplx s, const SpectralQuery& query, ZetaMethod method,
                double direct_cutoff) {
  require(std::isfinite(s.real()) && std::isfinite(s.imag()), ErrorCode::InvalidArgument, "s must be finite");
  if (method == ZetaMethod::Direct) return zeta_direct(model, s, query, direct_cutoff);
  if (method == ZetaMethod::Continuation) return zeta_continuation(model, s, query);
  try {
    return zeta_continuation(model, s, query);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnsupportedModel) throw;
  }
  return zeta_direct(model, s, query, direct_cutoff);
}

ZetaResult zeta(const Spectrum& finite, cplx s, double shift) {
  require(!finite.empty(), ErrorCode::InvalidArgument, "empty spectrum");
  require(finite.tail.coeff == 0.0, ErrorCode::InvalidArgument, "finite spectrum expected");
  cplx sum = 0.0;
  for (const auto& e : finite.entries) {
    const double mu = e.lambda - shift;
    require(mu > 0.0, ErrorCode::NonPositiveShiftedOperator, "non-positive shifted eigenvalue");
    sum += e.multiplicity * std::exp(-s * std::log(mu));
  }
  return {sum, 1e-15 * std::abs(sum) * finite.entries.size(), "direct"};
}

LogDetResult log_det(const ModelOperator& model, const SpectralQuery& query) {
  constexpr double h = 1e-4;
  double zeta_err = 0.0;
  const auto z = [&](double s) {
    const auto r = zeta(model, cplx(s, 0.0), query, ZetaMethod::Continuation);
    zeta_err = std::max(zeta_err, r.error);
    return r.value.real();
  };
  const double d1 = (z(h) - z(-h)) / (2.0 * h);
  const double d2 = (z(0.5 * h) - z(-0.5 * h)) / h;
  const double deriv = (4.0 * d2 - d1) / 3.0;
  LogDetResult r;
  r.log_det = -deriv;
  r.det = std::exp(r.log_det);
  r.error = std::abs(d2 - d1) / 15.0 + 3.0 * zeta_err / h;
  return r;
}

LogDetResult log_det(const Spectrum& finite, double shift) {
  require(!finite.empty(), ErrorCode::InvalidArgument, "empty spectrum");
  require(finite.tail.coeff == 0.0, ErrorCode::InvalidArgument, "finite spectrum expected");
  num::CompensatedSum s;
  for (const auto& e : finite.entries) {
    const double mu = e.lambda - shift;
    require(mu > 0.0, ErrorCode::NonPositiveShiftedOperator, "non-positive shifted eigenvalue");
    s.add(e.multiplicity * std::log(mu));
  }
  LogDetResult r;
  r.log_det = s.value();
  r.det = std::exp(r.log_det);
  r.error = 1e-15 * std::abs(r.log_det) * finite.entries.size();
  return r;
}

AsymptoticSeries expansion_fit(const std::vector<FitSample>& samples, const std::vector<TemplateTerm>& terms,
                               const std::string& variable) {
  const int m = static_cast<int>(samples.size());
  const int p = static_cast<int>(terms.size());
  require(p >= 1, ErrorCode::InvalidArgument, "empty fit template");
  require(m >= p + 2, ErrorCode::InvalidArgument,
          "need at least " + std::to_string(p + 2) + " samples, got " + std::to_string(m));
  for (int i = 0; i < p; ++i) {
    require(terms[i].log_power >= 0, ErrorCode::InvalidArgument, "log powers must be non-negative");
    for (int k = 0; k < i; ++k) {
      require(terms[i].power != terms[k].power || terms[i].log_power != terms[k].log_power,
              ErrorCode::InvalidArgument, "duplicate template term");
    }
  }
  double lo = INFINITY;
  double hi = 0.0;
  std::vector<double> eps;
  for (const auto& s : samples) {
    require(s.eps > 0.0 && std::isfinite(s.eps) && std::isfinite(s.value), ErrorCode::InvalidArgument,
            "samples need finite eps > 0 and finite values");
    eps.push_back(s.eps);
    lo = std::min(lo, s.eps);
    hi = std::max(hi, s.eps);
  }
  std::sort(eps.begin(), eps.end());
  require(std::adjacent_find(eps.begin(), eps.end()) == eps.end(), ErrorCode::InvalidArgument,
          "sample points must be distinct");

  Eigen::MatrixXd A(m, p);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const double e = samples[i].eps;
    for (int k = 0; k < p; ++k) A(i, k) = std::pow(e, terms[k].power) * std::pow(std::log(e), terms[k].log_power);
    b(i) = samples[i].value;
  }
  Eigen::VectorXd scale(p);
  for (int k = 0; k < p; ++k) {
    scale(k) = A.col(k).norm();
    require(scale(k) > 0.0, ErrorCode::RankDeficient, "template column vanishes on the samples");
    A.col(k) /= scale(k);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(p - 1);
  if (smin <= smax * m * std::numeric_limits<double>::epsilon()) {
    fail(ErrorCode::RankDeficient, "design matrix is rank deficient");
  }
  const double cond = smax / smin;
  if (cond > 1e12) fail(ErrorCode::IllConditioned, "fit condition number " + std::to_string(cond) + " exceeds 1e12");
  const Eigen::VectorXd x = svd.solve(b);
  const Eigen::VectorXd resid = A * x - b;
  const double rnorm = resid.norm();
  const double sigma2 = rnorm * rnorm / std::max(1, m - p);
  const Eigen::MatrixXd V = svd.matrixV();
  AsymptoticSeries series(variable);
  for (int k = 0; k < p; ++k) {
    double var = 0.0;
    for (int j = 0; j < p; ++j) var += V(k, j) * V(k, j) / (sv(j) * sv(j));
    const double c = x(k) / scale(k);
    SeriesTerm t;
    t.power = terms[k].power;
    t.log_power = terms[k].log_power;
    t.coefficient = c;
    t.error = (std::sqrt(sigma2 * var) + cond * 1e-16 * b.norm()) / scale(k);
    t.provenance = Provenance::Fitted;
    series.add(t);
  }
  series.diagnostics = FitDiagnostics{rnorm, cond, m, hi >= 10.0 * lo};
  return series;
}

}  // namespace speclab
