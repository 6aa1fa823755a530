#pragma once

// Closed-form low-order heat invariants for Laplace type operators with
// mixed, oblique and Zaremba boundary conditions.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "speclab/models.hpp"
#include "speclab/series.hpp"

namespace speclab {

struct BoundaryData {
  enum class Kind { Mixed, ZarembaDirichlet, ZarembaRobin };
  double vol = 0.0;
  double tr_Pi = 0.0;
  double int_K = 0.0;      // integral of the extrinsic curvature trace
  double int_trPiS = 0.0;  // integral of tr(Pi S)
  Kind kind = Kind::Mixed;
};

struct GeometryData {
  int n = 1;
  int N = 1;
  double vol_M = 0.0;
  double int_R = 0.0;
  double int_trQ = 0.0;
  std::vector<BoundaryData> boundary;
  double sigma0_vol = 0.0;
  int zaremba_alpha = -1;  // -1 or 7
};

void validate(const GeometryData& geom);

struct HeatInvariants {
  double A0 = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
};

HeatInvariants heat_invariants(const GeometryData& geom);

/// Theta(t) ~ sum_k (4 pi)^{-n/2} A_k t^{(k-n)/2}, k = 0, 1, 2.
AsymptoticSeries predicted_trace_coeffs(const GeometryData& geom);

/// Geometry data of a compact model operator. Robin ends contribute S to tr(Pi S).
GeometryData geometry_of(const ModelOperator& model);

/// Tangential part of an oblique boundary operator.
struct ObliqueSymbol {
  int n = 2;
  std::vector<Eigen::MatrixXcd> gammas;  // n - 1 anti-self-adjoint N x N matrices
  Eigen::MatrixXd boundary_metric;       // lower-index metric g_ij on the boundary
  Eigen::MatrixXcd Pi;                   // orthogonal projector
  int N() const { return static_cast<int>(Pi.rows()); }
};

void validate(const ObliqueSymbol& sym);

/// Gamma^a in coordinates where the boundary metric is the identity.
std::vector<Eigen::MatrixXcd> whitened_gammas(const ObliqueSymbol& sym);

/// Certifies that |xi|^2 + T(xi)^2 > 0 on the unit sphere with a Lipschitz
/// margin over an angle mesh (0.05 rad, refined when needed). Returns the smallest sampled eigenvalue;
/// throws NotElliptic when positivity cannot be proved.
double certify_ellipticity(const ObliqueSymbol& sym);

enum class GammaMethod { Quadrature, Commuting, Clifford };
std::string to_string(GammaMethod m);
GammaMethod gamma_method_from_string(const std::string& s);

struct GammaResult {
  double value = 0.0;
  double error = 0.0;
  int order = 0;  // Gauss-Hermite nodes per axis (quadrature path)
  std::string method;
};

/// gamma = int dxi pi^{-(n-1)/2} tr exp(-|xi|^2 - T(xi)^2), traced over the full fiber.
GammaResult ggs_gamma(const ObliqueSymbol& sym, GammaMethod method, double rel_tol = 1e-10);

/// A_1 = vol sqrt(pi)/2 (2 tr Pi - 3N + 2 gamma).
double ggs_a1(double gamma, int N, double boundary_vol, double tr_Pi);
double ggs_a1(const ObliqueSymbol& sym, double boundary_vol, GammaMethod method = GammaMethod::Quadrature);

/// A_1 of mixed conditions, sqrt(pi)/2 (2 tr Pi - N) vol.
double mixed_a1(int N, double boundary_vol, double tr_Pi);

}  // namespace speclab
