#pragma once

// Mellin transforms of heat traces: the entire function A_q, spectral zeta
// functions, zeta-regularized determinants and least-squares coefficient fits.

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "speclab/models.hpp"
#include "speclab/series.hpp"

namespace speclab {

using cplx = std::complex<double>;

/// Which spectrum a Mellin query refers to: eigenvalues lambda - shift, with
/// exact zero eigenvalues of the unshifted operator optionally removed.
struct SpectralQuery {
  double shift = 0.0;
  bool exclude_zero_modes = false;
};

/// Exact small-time form of a heat trace:
///   Theta(t) = exp(-t decay) * (sum_i c_i t^{p_i} + E(t))
/// with E exponentially small as t -> 0. Available for lattice models and
/// intervals with Dirichlet/Neumann ends.
struct SmallTimeForm {
  int dim = 0;
  double decay = 0.0;
  std::vector<std::pair<double, double>> terms;  // (power, coefficient)
  /// Multiplicity of the eigenvalue zero.
  double zero_modes = 0.0;
  /// Evaluates E(t).
  std::function<double(double)> remainder;
};

/// Throws UnsupportedModel for models without an exact small-time form.
SmallTimeForm small_time_form(const ModelOperator& model);

struct AqResult {
  cplx q;
  cplx value;
  double error = 0.0;
  double split_point = 1.0;
};

/// A_q = (4 pi)^{n/2} / Gamma(-q) * int_0^inf t^{-q-1+n/2} Theta(t) dt, continued to all q.
AqResult a_q(const ModelOperator& model, cplx q, int series_order, const SpectralQuery& query = {});

/// Standard heat coefficient (-1)^k/k! A_q at q = k.
double standard_coefficient(const ModelOperator& model, int k);

/// dA_q/dq at real q by complex-step differentiation.
double a_q_derivative(const ModelOperator& model, double q, int series_order);

enum class ZetaMethod { Auto, Direct, Continuation };

struct ZetaResult {
  cplx value;
  double error = 0.0;
  std::string method;
};

/// Spectral zeta function sum mult (lambda - shift)^{-s}. Direct summation
/// adds the Weyl-law tail; it needs Re s > n/2 and is accurate for n = 1.
ZetaResult zeta(const ModelOperator& model, cplx s, const SpectralQuery& query = {},
                ZetaMethod method = ZetaMethod::Auto, double direct_cutoff = 1e10);
/// Finite spectra: exact sum.
ZetaResult zeta(const Spectrum& finite, cplx s, double shift = 0.0);

struct LogDetResult {
  double log_det = 0.0;
  double det = 0.0;
  double error = 0.0;
};

/// -zeta'(0) by central differences with Richardson refinement.
LogDetResult log_det(const ModelOperator& model, const SpectralQuery& query = {});
LogDetResult log_det(const Spectrum& finite, double shift = 0.0);

struct FitSample {
  double eps = 0.0;
  double value = 0.0;
};

struct TemplateTerm {
  double power = 0.0;
  int log_power = 0;
};

/// Least squares fit of samples to sum_k c_k eps^{p_k} (log eps)^{l_k}.
/// Needs at least template.size() + 2 distinct samples.
AsymptoticSeries expansion_fit(const std::vector<FitSample>& samples, const std::vector<TemplateTerm>& terms,
                               const std::string& variable = "eps");

}  // namespace speclab
