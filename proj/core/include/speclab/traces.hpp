#pragma once

// Classical, relativistic and quantum (Bose/Fermi) heat traces.

#include <optional>
#include <string>

#include "speclab/models.hpp"

namespace speclab {

struct TraceResult {
  double value = 0.0;
  double error_bound = 0.0;
  std::string method;
};

enum class TraceMethod { Auto, Direct, Theta };
enum class Statistics { Boltzmann, Relativistic, Bose, Fermi };
/// Direct spectral sum, or the integral representation (subordination / kernel).
enum class SumPath { Direct, Integral };
enum class KernelKind { Fermi, Bose, Zero };

std::string to_string(Statistics s);
Statistics statistics_from_string(const std::string& s);
std::string to_string(KernelKind k);

/// Sum of mult * exp(-t lambda) with a Weyl-law tail bound. Throws TailTooLarge
/// when the bound exceeds rel_tol * value.
TraceResult classical_trace(const Spectrum& spec, double t, double rel_tol = 1e-12);

/// Poisson-summed (Jacobi theta) evaluation for lattice models.
TraceResult theta_trace(const LatticeForm& lattice, double t);

/// Smallest cutoff (power of two times the base scale) for which the heat
/// trace tail at time t falls below rel_tol.
double heat_cutoff(const ModelOperator& model, double t, double rel_tol = 1e-14);
/// Same for sums of exp(-beta sqrt(lambda)).
double sqrt_cutoff(const ModelOperator& model, double beta, double rel_tol = 1e-14);

/// Heat trace evaluator for a model: picks the theta path for lattice models at
/// small t and direct summation otherwise.
class HeatTrace {
 public:
  /// cutoff <= 0 selects one that supports direct summation down to theta_switch().
  HeatTrace(const ModelOperator& model, double cutoff = 0.0);
  explicit HeatTrace(Spectrum spec);

  TraceResult operator()(double t, TraceMethod method = TraceMethod::Auto) const;

  const Spectrum& spectrum() const { return spec_; }
  const std::optional<LatticeForm>& lattice() const { return lattice_; }
  /// Theta path is preferred below this time.
  double theta_switch() const { return theta_switch_; }

 private:
  Spectrum spec_;
  std::optional<LatticeForm> lattice_;
  std::optional<Interval> interval_;
  double theta_switch_ = 0.0;
};

/// Tr exp(-beta L^{1/2}). Integral path uses the subordination identity with
/// zero modes subtracted before integrating.
TraceResult relativistic_trace(const HeatTrace& trace, double beta, SumPath path);

/// Bose/Fermi occupation traces of H = L^{1/2} at chemical potential mu.
/// Boltzmann gives exp(beta mu) Tr exp(-beta H).
TraceResult quantum_trace(const HeatTrace& trace, double beta, double mu, Statistics stats, SumPath path);

struct KernelValue {
  double value = 0.0;
  int terms = 0;
};

/// Subordination kernels h_f, h_b (with optional beta*mu shift) and h_0.
KernelValue kernel_eval(KernelKind kind, double t, double beta_mu = 0.0);

}  // namespace speclab
