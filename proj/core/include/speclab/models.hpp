#pragma once

// Exactly solvable model operators and their spectra.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace speclab {

struct BC {
  enum class Kind { Dirichlet, Neumann, Robin };
  Kind kind = Kind::Dirichlet;
  double S = 0.0;  // Robin coefficient, inward normal: (d/dN + S) u = 0

  static BC dirichlet() { return {Kind::Dirichlet, 0.0}; }
  static BC neumann() { return {Kind::Neumann, 0.0}; }
  static BC robin(double s) { return {Kind::Robin, s}; }
  /// Robin coefficient with Neumann mapped to S = 0; undefined for Dirichlet.
  double robin_coefficient() const { return kind == Kind::Robin ? S : 0.0; }
  bool operator==(const BC&) const = default;
};

/// -(d/dx + i theta/r)^2 + m^2 on a circle of radius r.
struct Circle {
  double radius = 1.0;
  double twist = 0.0;
  double mass2 = 0.0;
};

/// Flat torus R^n / (2 pi Z)^n with constant inverse metric G:
/// eigenvalues (k + theta)^T G (k + theta) + m^2.
struct FlatTorus {
  Eigen::MatrixXd inverse_metric;
  Eigen::VectorXd twist;
  double mass2 = 0.0;
  int dim() const { return static_cast<int>(inverse_metric.rows()); }
};

/// -d^2/dx^2 on [0, L].
struct Interval {
  double length = 1.0;
  BC left = BC::dirichlet();
  BC right = BC::dirichlet();
};

/// Laplacian on the round 2-sphere.
struct Sphere2 {
  double radius = 1.0;
};

/// Magnetic Laplacian on the plane with constant field B. Spectra are level
/// densities per unit area.
struct Landau {
  double field = 1.0;
  double mass2 = 0.0;
};

/// Dirac operator e * (-i d/dx + theta) on the unit circle.
struct DiracCircle {
  double frame = 1.0;
  double twist = 0.0;
};

using ModelOperator = std::variant<Circle, FlatTorus, Interval, Sphere2, Landau, DiracCircle>;

/// Throws InvalidArgument on violated field invariants.
void validate(const ModelOperator& model);
std::string model_name(const ModelOperator& model);
int dimension(const ModelOperator& model);
/// Riemannian volume; 1 for per-unit-area Landau spectra.
double volume(const ModelOperator& model);

/// Lattice description for circle and torus models, in the common form
/// lambda = (k + theta)^T G (k + theta) + m^2, k in Z^n.
struct LatticeForm {
  Eigen::MatrixXd G;
  Eigen::VectorXd theta;
  double mass2 = 0.0;
  int dim() const { return static_cast<int>(G.rows()); }
};
std::optional<LatticeForm> lattice_form(const ModelOperator& model);

/// Reduce twists mod 1; in one dimension also fold into [0, 1/2] (theta and -theta are isospectral).
Eigen::VectorXd canonical_twist(const Eigen::VectorXd& theta);

/// Counting bound N(lambda) <= coeff * (offset + sqrt(lambda))^dim, used for tail bounds.
struct CountingBound {
  int dim = 0;
  double coeff = 0.0;  // zero marks a finite spectrum
  double offset = 0.0;
  bool operator==(const CountingBound&) const = default;
};

struct SpectrumEntry {
  double lambda = 0.0;
  /// Integer for compact models; level density B/2pi for Landau.
  double multiplicity = 0.0;
  bool operator==(const SpectrumEntry&) const = default;
};

struct Spectrum {
  std::vector<SpectrumEntry> entries;
  double cutoff = 0.0;
  bool complete_below_cutoff = true;
  bool per_unit_volume = false;
  CountingBound tail;

  /// A complete finite spectrum (no tail beyond the listed entries).
  static Spectrum finite(std::vector<SpectrumEntry> entries);

  bool empty() const { return entries.empty(); }
  double lambda_min() const;
  double lambda_max() const;
  /// Multiplicity of the exact zero eigenvalue.
  double zero_multiplicity() const;
  bool has_nonpositive() const { return !entries.empty() && lambda_min() <= 0.0; }
  /// Copy without eigenvalues equal to zero.
  Spectrum without_zero_modes() const;
  bool operator==(const Spectrum&) const = default;
};

void to_json(nlohmann::json& j, const Spectrum& s);
void from_json(const nlohmann::json& j, Spectrum& s);

Spectrum eigenvalues(const ModelOperator& model, double cutoff);

/// Signed spectrum e(k + theta), |e(k + theta)| <= cutoff.
Spectrum dirac_eigenvalues(const DiracCircle& model, double cutoff);

double counting_function(const Spectrum& spec, double lambda);

CountingBound counting_bound(const ModelOperator& model);

/// Secular residual for an interval: zero exactly at eigenvalues (any sign of lambda).
double interval_residual(const Interval& model, double lambda);

/// Calls f(k) for every k in Z^n with (k+theta)^T G (k+theta) <= radius2.
void for_each_lattice_point(const Eigen::MatrixXd& G, const Eigen::VectorXd& theta, double radius2,
                            const std::function<void(const Eigen::VectorXd&)>& f);

}  // namespace speclab
