#pragma once

// Resummed heat kernel for a covariantly constant U(1) field F on flat space.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace speclab {

struct MagneticModel {
  Eigen::MatrixXd F;  // real antisymmetric, even dimension
  /// Optional bundle curvature R_{mu nu}, row-major n x n array of N x N blocks.
  std::vector<Eigen::MatrixXcd> bundle_curv;

  int n() const { return static_cast<int>(F.rows()); }
  int N() const { return bundle_curv.empty() ? 1 : static_cast<int>(bundle_curv.front().rows()); }
};

void validate(const MagneticModel& m);

/// (4 pi t)^{-n/2} det(tiF / sinh(tiF))^{1/2} exp(-<u, tiF coth(tiF) u>/4t), u = x - x'.
/// The fiber part is the identity.
double u0_kernel(const MagneticModel& m, double t, const Eigen::VectorXd& x, const Eigen::VectorXd& xp);

/// Real antisymmetric h with coth(tiF) - 1/(itF) = i h.
Eigen::MatrixXd h_tensor(const MagneticModel& m, double t);

struct LandauCheck {
  double diagonal = 0.0;
  double level_sum = 0.0;
  double difference = 0.0;  // relative
  int levels = 0;
};

/// B/(4 pi sinh tB) against the Landau level sum with its geometric tail.
LandauCheck landau_check(double B, double t);

/// Leading b_2 on the diagonal: (1/2) H^{mu nu} R_{mu nu} for flat base, (R/6) I at t = 0.
Eigen::MatrixXcd b2_leading(const MagneticModel& m, double scalar_curvature, double t);

}  // namespace speclab
