#pragma once

// Combined heat traces and relative invariants of commuting operator pairs,
// and Bogolyubov invariants.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "speclab/models.hpp"
#include "speclab/series.hpp"
#include "speclab/traces.hpp"

namespace speclab {

/// Two operators diagonal in one Fourier basis: lattice models (circle or
/// flat torus) of equal dimension and twist, or two Dirac circles of equal twist.
struct TracePair {
  ModelOperator plus;
  ModelOperator minus;
  double mass = 0.0;
};

/// Throws NonCommutingPair when the members do not share an eigenbasis.
void validate(const TracePair& pair);
bool is_dirac_pair(const TracePair& pair);
int dimension(const TracePair& pair);

/// Lower-index metric g_ij(t, s), the inverse of t g_+^{ij} + s g_-^{ij}.
Eigen::MatrixXd effective_metric(const TracePair& pair, double t, double s);

struct PairValue {
  double value = 0.0;
  double error_bound = 0.0;
  std::string method;  // "direct" or "theta"
};

/// Tr exp(-t L+) exp(-s L-). For Dirac pairs L = D^2.
PairValue combined_trace_X(const TracePair& pair, double t, double s);
/// Tr D+ exp(-t D+^2) D- exp(-s D-^2), Dirac pairs only.
PairValue combined_trace_Y(const TracePair& pair, double t, double s);
/// Tr (e^{-tL+} - e^{-tL-})(e^{-sL+} - e^{-sL-}).
PairValue relative_psi(const TracePair& pair, double t, double s);
/// Tr (D+ e^{-tD+^2} - D- e^{-tD-^2})(D+ e^{-sD+^2} - D- e^{-sD-^2}), Dirac pairs only.
PairValue relative_phi(const TracePair& pair, double t, double s);

enum class CombinedTrace { X, Y };

struct Theorem1Fit {
  double fitted = 0.0;
  double predicted = 0.0;
  AsymptoticSeries series{"eps"};
};

/// Fits X(eps t, eps s) (4 pi eps)^{n/2} (times eps for Y) to a quadratic in eps
/// and compares the constant term with the leading coefficient integral:
/// vol N det g^{1/2} for X, vol (N/2) g^{1/2} e+ g e- for Y.
Theorem1Fit theorem1_leading_fit(const TracePair& pair, double t, double s, const std::vector<double>& epsilons,
                                 CombinedTrace which = CombinedTrace::X);
/// The predicted leading coefficient alone.
double theorem1_predicted(const TracePair& pair, double t, double s, CombinedTrace which = CombinedTrace::X);

enum class BogolyubovMethod { Spectral, Kernel };
std::string to_string(BogolyubovMethod m);
BogolyubovMethod bogolyubov_method_from_string(const std::string& s);

/// Bosonic (Statistics::Bose) or fermionic (Statistics::Fermi, Dirac pairs only)
/// Bogolyubov invariant at inverse temperature beta.
PairValue bogolyubov(const TracePair& pair, double beta, Statistics stats, BogolyubovMethod method,
                     double rel_tol = 1e-9);

struct ExponentFit {
  double exponent = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;  // relative l2 residual
};

/// Fits B(beta) = A beta^p + c0 + c1 beta + c2 beta^2 for the leading exponent p
/// (variable projection: linear least squares inside a one-dimensional minimization).
ExponentFit bogolyubov_exponent_fit(const TracePair& pair, const std::vector<double>& betas, Statistics stats,
                                    BogolyubovMethod method = BogolyubovMethod::Spectral);

}  // namespace speclab
