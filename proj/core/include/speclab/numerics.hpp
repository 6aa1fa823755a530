#pragma once

// Shared numerical kernels: quadrature wrappers, Gauss-Hermite rules,
// complex gamma, compensated summation and small matrix-function helpers.

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace speclab::num {

using cplx = std::complex<double>;

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct ComplexEstimate {
  cplx value{};
  double error = 0.0;
};

/// Neumaier-compensated accumulator. Order of `add` calls fixes the result.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double pairwise_sum(std::span<const double> xs);

/// Globally adaptive Gauss-Kronrod (21 point) on [a, b]. Throws QuadratureFailure if the
/// estimated error exceeds max(rel_tol*|I|, abs_tol).
Estimate integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                   double abs_tol = 0.0, unsigned max_depth = 20);

ComplexEstimate integrate(const std::function<cplx(double)>& f, double a, double b, double rel_tol,
                          double abs_tol = 0.0, unsigned max_depth = 20);

/// Integral over (0, inf) of a function that decays at both ends faster than
/// any power in log t (e.g. exp(-1/4t) at zero and exponential decay at
/// infinity). Integrates in u = log t over panels of unit width, extending
/// outward until the panel contribution is negligible.
Estimate integrate_log_line(const std::function<double(double)>& f, double rel_tol, double u_center = 0.0);

struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // weight function exp(-x^2)
};

/// Golub-Welsch construction, cached per order.
const GaussHermiteRule& gauss_hermite(int order);

/// Tensor-product Gauss-Hermite integration of f over R^dim against exp(-|x|^2).
/// `order` nodes per axis. The functor receives a point and returns a value.
double gauss_hermite_tensor(int dim, int order, const std::function<double(std::span<const double>)>& f);

// Complex gamma family (Lanczos, g = 7).
cplx lgamma(cplx z);
cplx gamma(cplx z);
/// sin(pi z) with argument reduction, exact zeros at the integers.
cplx sinpi(cplx z);
/// 1/Gamma(z), entire.
cplx rgamma(cplx z);
/// (1/Gamma(z)) / (z + k) for integer k >= 0: z(z+1)...(z+k-1)/Gamma(z+k+1).
cplx rgamma_div(cplx z, int k);

/// exp(x) - sum_{j<order} x^j/j!, evaluated without cancellation for |x| < ~10.
double exp_tail(double x, int order);

/// Weyl-type tail bound: given a counting bound N(lambda) <= coeff*(offset+sqrt(lambda))^dim,
/// returns an upper bound for sum_{lambda > cutoff} exp(-t lambda).
double weyl_tail_bound(int dim, double coeff, double offset, double cutoff, double t);

/// Same counting bound, tail of sum exp(-beta*sqrt(lambda)) beyond cutoff.
double weyl_tail_bound_sqrt(int dim, double coeff, double offset, double cutoff, double beta);

/// Symmetric-matrix function: V f(diag) V^T.
Eigen::MatrixXd sym_function(const Eigen::MatrixXd& sym, const std::function<double(double)>& f);

/// Visits the points of a hyperspherical angle grid on S^{d-1} with angular step h
/// (the two points +-1 when d = 1). Every point of the sphere lies within h of the grid.
void for_each_sphere_point(int d, double h, const std::function<void(std::span<const double>)>& f);
/// Number of points for_each_sphere_point visits.
long sphere_point_count(int d, double h);

/// Extreme eigenvalues of a Hermitian matrix quadratic form x -> sum x_a x_b M_ab over
/// the unit sphere, sampled on the angle grid. Each Rayleigh quotient is a quadratic form
/// of norm at most K = max |eigenvalue|, so on points within h of the grid the eigenvalues
/// move by at most 2 h K, and K <= K_sampled / (1 - 2h).
struct QuadraticFormBounds {
  double min_sampled = 0.0;
  double max_sampled = 0.0;
  double margin = 0.0;  // true extremes lie within the sampled ones widened by this
  double step = 0.0;
};

/// `eigs(x)` returns the eigenvalues at a unit vector x. `accept` decides whether the
/// bounds are good enough; otherwise the grid is refined while it stays below ~2e6 points.
QuadraticFormBounds quadratic_form_bounds(int d, const std::function<Eigen::VectorXd(std::span<const double>)>& eigs,
                                          const std::function<bool(const QuadraticFormBounds&)>& accept,
                                          double h0 = 0.05);

/// Even functions of x written in y = x^2 (series below x = 1e-4):
/// x coth x, log(sinh x / x), and (coth x - 1/x) / x.
double xcoth_sq(double y);
double log_sinhc_sq(double y);
double coth_odd_sq(double y);

}  // namespace speclab::num
