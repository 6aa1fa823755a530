#pragma once

// Seeded random problem instances shared by the CLI and the test suites.

#include <cstdint>

#include "speclab/invariants.hpp"
#include "speclab/weyl.hpp"

namespace speclab::cli {

/// Gamma^a = U diag(i d_a) U^* in whitened coordinates (pairwise commuting),
/// with sum_a d_a^2 <= 0.8 per eigenvector, a random boundary metric and a random projector.
ObliqueSymbol random_commuting_symbol(int n, int N, std::uint64_t seed);

/// Gamma^a = i sqrt(kappa) (sigma_a (x) I) on a projector of rank 2 floor(N/2),
/// conjugated by a random unitary. Needs N >= 2 when n >= 2, and n <= 4.
ObliqueSymbol random_clifford_symbol(int n, int N, double kappa, std::uint64_t seed);

/// Random positive metrics and curvatures with [R+, R-] != 0 in general.
WeylPair random_weyl_pair(int n, std::uint64_t seed, double curvature_scale = 1.0);

/// Standard symplectic curvature b J (b on each 2x2 block; odd trailing coordinate flat).
Eigen::MatrixXd symplectic(int n, double b);

}  // namespace speclab::cli
