#pragma once

// Heat determinant K(t) of flat circle and torus models through eigenfunction correlators.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "speclab/models.hpp"
#include "speclab/series.hpp"

namespace speclab {

/// Psi^{k_1..k_n}_{l_1..l_n} = int Phi^{k_1}_{l_1} ^ ... ^ Phi^{k_n}_{l_n}, Phi^k_l = <phi_k, d phi_l>,
/// for Fourier modes phi_k = exp(i (k + theta) x) / sqrt(vol). Supports n = 1, 2.
std::complex<double> correlator(const ModelOperator& model, const std::vector<Eigen::VectorXi>& k,
                                const std::vector<Eigen::VectorXi>& l);

struct CorrelatorEntry {
  std::vector<Eigen::VectorXi> k;
  std::vector<Eigen::VectorXi> l;
  std::complex<double> value;
};

/// All nonzero correlators with mode components |k_i| <= cutoff.
std::vector<CorrelatorEntry> correlators(const ModelOperator& model, int cutoff);

struct HeatDetResult {
  double value = 0.0;
  double error_bound = 0.0;
  std::string method;
  long terms = 0;
};

/// Spectral sum (1/n!) sum exp(-t sum lambda) |Psi|^2. The two-torus sum costs
/// O(cutoff^4) and is refused (TailTooLarge) beyond `budget` terms.
HeatDetResult heat_det(const ModelOperator& model, double t, long budget = 50'000'000);

/// The defining double integral over the circle, int dx dx' conj(U) d_x d_x' U,
/// by quadrature of the image-sum kernel.
HeatDetResult heat_det_defining(const ModelOperator& model, double t, double rel_tol = 1e-12);

/// Coefficient of t^{-n(n+1/2)}: (1/2) N^n (4 pi)^{-n^2} (pi/2n)^{n/2} vol.
double heat_det_leading(int n, int N, double vol);

/// Exponent n(n + 1/2) of the leading small-t power.
double heat_det_order(int n);

/// Fits K(t) t^{n(n+1/2)} over the given times to c_0 + c_1 t^{1/2} + c_2 t.
AsymptoticSeries heat_det_fit(const ModelOperator& model, const std::vector<double>& times);

}  // namespace speclab
