#include "speclab/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "speclab/errors.hpp"
#include "speclab/numerics.hpp"

namespace speclab {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);
constexpr double kMeshStep = 0.05;

using CMat = Eigen::MatrixXcd;

CMat tangential(const std::vector<CMat>& g, std::span<const double> x) {
  CMat T = CMat::Zero(g.front().rows(), g.front().cols());
  for (size_t a = 0; a < g.size(); ++a) T += x[a] * g[a];
  return T;
}

/// Eigenvalues of the Hermitian matrix -T(x)^2 (non-negative).
Eigen::VectorXd minus_t2_eigs(const std::vector<CMat>& g, std::span<const double> x) {
  const CMat T = tangential(g, x);
  CMat M = -(T * T);
  M = 0.5 * (M + M.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Bounds on the eigenvalues of -T(x)^2 over |x| = 1. Ellipticity needs the largest below 1.
num::QuadraticFormBounds tangential_bounds(const std::vector<CMat>& g) {
  return num::quadratic_form_bounds(
      static_cast<int>(g.size()), [&](std::span<const double> x) { return minus_t2_eigs(g, x); },
      [](const num::QuadraticFormBounds& b) { return b.max_sampled + b.margin < 1.0; }, kMeshStep);
}

double boundary_a1(const BoundaryData& b, int N) {
  switch (b.kind) {
    case BoundaryData::Kind::Mixed: return mixed_a1(N, b.vol, b.tr_Pi);
    case BoundaryData::Kind::ZarembaDirichlet: return -0.5 * kSqrtPi * N * b.vol;
    case BoundaryData::Kind::ZarembaRobin: return 0.5 * kSqrtPi * N * b.vol;
  }
  return 0.0;
}

}  // namespace

void validate(const GeometryData& g) {
  require(g.n >= 1 && g.N >= 1, ErrorCode::InvalidArgument, "need n >= 1 and N >= 1");
  require(g.vol_M > 0.0, ErrorCode::InvalidArgument, "vol_M must be positive");
  require(g.zaremba_alpha == -1 || g.zaremba_alpha == 7, ErrorCode::InvalidArgument, "zaremba_alpha must be -1 or 7");
  require(g.sigma0_vol >= 0.0, ErrorCode::InvalidArgument, "sigma0_vol must be non-negative");
  for (const auto& b : g.boundary) {
    require(b.vol >= 0.0, ErrorCode::InvalidArgument, "boundary volume must be non-negative");
    require(b.tr_Pi >= 0.0 && b.tr_Pi <= g.N, ErrorCode::InvalidArgument, "tr Pi must lie in [0, N]");
    require(b.kind != BoundaryData::Kind::ZarembaDirichlet || b.int_trPiS == 0.0, ErrorCode::InvalidArgument,
            "Dirichlet parts carry no Robin endomorphism");
  }
}

double mixed_a1(int N, double boundary_vol, double tr_Pi) { return 0.5 * kSqrtPi * (2.0 * tr_Pi - N) * boundary_vol; }

HeatInvariants heat_invariants(const GeometryData& g) {
  validate(g);
  HeatInvariants h;
  h.A0 = g.N * g.vol_M;
  h.A2 = g.N * g.int_R / 6.0 - g.int_trQ;
  for (const auto& b : g.boundary) {
    h.A1 += boundary_a1(b, g.N);
    h.A2 += g.N * b.int_K / 3.0 + 2.0 * b.int_trPiS;
  }
  h.A2 += g.zaremba_alpha * 0.25 * kPi * g.N * g.sigma0_vol;
  return h;
}

AsymptoticSeries predicted_trace_coeffs(const GeometryData& g) {
  const auto h = heat_invariants(g);
  const double norm = std::pow(4.0 * kPi, -0.5 * g.n);
  AsymptoticSeries s("t");
  const double A[3] = {h.A0, h.A1, h.A2};
  for (int k = 0; k < 3; ++k) {
    SeriesTerm t;
    t.power = 0.5 * (k - g.n);
    t.coefficient = norm * A[k];
    t.provenance = Provenance::ClosedForm;
    s.add(t);
  }
  return s;
}

GeometryData geometry_of(const ModelOperator& model) {
  validate(model);
  GeometryData g;
  g.n = dimension(model);
  g.N = 1;
  g.vol_M = volume(model);
  if (const auto* c = std::get_if<Circle>(&model)) {
    g.int_trQ = c->mass2 * g.vol_M;
  } else if (const auto* t = std::get_if<FlatTorus>(&model)) {
    g.int_trQ = t->mass2 * g.vol_M;
  } else if (const auto* s = std::get_if<Sphere2>(&model)) {
    g.int_R = 2.0 / (s->radius * s->radius) * g.vol_M;
  } else if (const auto* iv = std::get_if<Interval>(&model)) {
    for (const BC& bc : {iv->left, iv->right}) {
      BoundaryData b;
      b.vol = 1.0;
      b.tr_Pi = bc.kind == BC::Kind::Dirichlet ? 0.0 : 1.0;
      b.int_trPiS = bc.kind == BC::Kind::Robin ? bc.S : 0.0;
      g.boundary.push_back(b);
    }
  } else {
    fail(ErrorCode::UnsupportedModel, model_name(model) + " has no compact geometry description");
  }
  return g;
}

void validate(const ObliqueSymbol& sym) {
  const int N = sym.N();
  require(N >= 1 && sym.Pi.cols() == N, ErrorCode::InvalidArgument, "Pi must be a square N x N matrix");
  require(sym.n >= 1, ErrorCode::InvalidArgument, "n must be positive");
  require(static_cast<int>(sym.gammas.size()) == sym.n - 1, ErrorCode::InvalidArgument, "need n - 1 Gamma matrices");
  const double tol = 1e-12;
  require((sym.Pi - sym.Pi.adjoint()).norm() <= tol && (sym.Pi * sym.Pi - sym.Pi).norm() <= 1e-10,
          ErrorCode::InvalidArgument, "Pi must be an orthogonal projector");
  for (const auto& G : sym.gammas) {
    require(G.rows() == N && G.cols() == N, ErrorCode::InvalidArgument, "Gamma matrices must be N x N");
    require((G + G.adjoint()).norm() <= tol * std::max(1.0, G.norm()), ErrorCode::InvalidArgument,
            "Gamma matrices must be anti-self-adjoint");
  }
  if (sym.n > 1) {
    const auto& g = sym.boundary_metric;
    require(g.rows() == sym.n - 1 && g.cols() == sym.n - 1, ErrorCode::InvalidArgument,
            "boundary metric must be (n-1) x (n-1)");
    require((g - g.transpose()).norm() <= tol * g.norm(), ErrorCode::InvalidArgument, "boundary metric must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    require(es.eigenvalues().minCoeff() > 0.0, ErrorCode::InvalidArgument, "boundary metric must be positive definite");
  }
}

std::vector<CMat> whitened_gammas(const ObliqueSymbol& sym) {
  validate(sym);
  const int d = sym.n - 1;
  std::vector<CMat> out;
  if (d == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym.boundary_metric);
  const Eigen::MatrixXd half = es.operatorSqrt();
  for (int a = 0; a < d; ++a) {
    CMat G = CMat::Zero(sym.N(), sym.N());
    for (int j = 0; j < d; ++j) G += half(j, a) * sym.gammas[j];
    out.push_back(G);
  }
  return out;
}

double certify_ellipticity(const ObliqueSymbol& sym) {
  const auto g = whitened_gammas(sym);
  if (g.empty()) return 1.0;
  const auto b = tangential_bounds(g);
  if (!(b.max_sampled + b.margin < 1.0)) {
    fail(ErrorCode::NotElliptic, "cannot certify |xi|^2 + T^2 > 0: sampled minimum " +
                                     std::to_string(1.0 - b.max_sampled) + " vs Lipschitz margin " +
                                     std::to_string(b.margin));
  }
  return 1.0 - b.max_sampled;
}

std::string to_string(GammaMethod m) {
  switch (m) {
    case GammaMethod::Quadrature: return "quadrature";
    case GammaMethod::Commuting: return "commuting";
    case GammaMethod::Clifford: return "clifford";
  }
  return "quadrature";
}

GammaMethod gamma_method_from_string(const std::string& s) {
  if (s == "quadrature") return GammaMethod::Quadrature;
  if (s == "commuting") return GammaMethod::Commuting;
  if (s == "clifford") return GammaMethod::Clifford;
  fail(ErrorCode::InvalidArgument, "unknown gamma method '" + s + "'");
}

GammaResult ggs_gamma(const ObliqueSymbol& sym, GammaMethod method, double rel_tol) {
  certify_ellipticity(sym);
  const auto g = whitened_gammas(sym);
  const int d = static_cast<int>(g.size());
  const int N = sym.N();
  GammaResult r;
  r.method = to_string(method);
  if (d == 0) {
    r.value = N;
    return r;
  }
  const double scale = std::max(1.0, g.front().norm());
  switch (method) {
    case GammaMethod::Commuting: {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < i; ++j) {
          const double c = (g[i] * g[j] - g[j] * g[i]).norm();
          require(c <= 1e-12 * scale * scale, ErrorCode::WrongAlgebraicStructure,
                  "Gamma matrices do not commute (commutator norm " + std::to_string(c) + ")");
        }
      }
      CMat M = CMat::Identity(N, N);
      for (const auto& G : g) M += G * G;
      M = 0.5 * (M + M.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<CMat> es(M, Eigen::EigenvaluesOnly);
      require(es.eigenvalues().minCoeff() > 0.0, ErrorCode::NotElliptic, "I + Gamma^2 is not positive");
      for (int k = 0; k < N; ++k) r.value += 1.0 / std::sqrt(es.eigenvalues()(k));
      r.error = 1e-15 * N * r.value;
      return r;
    }
    case GammaMethod::Clifford: {
      const double trPi = sym.Pi.trace().real();
      double kappa = 0.0;
      if (trPi > 0.5) kappa = -(g[0] * g[0]).trace().real() / trPi;
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b <= a; ++b) {
          const CMat anti = g[a] * g[b] + g[b] * g[a];
          const CMat expect = (a == b ? -2.0 * kappa : 0.0) * sym.Pi;
          require((anti - expect).norm() <= 1e-10 * scale * scale, ErrorCode::WrongAlgebraicStructure,
                  "Gamma matrices do not satisfy the Clifford relation with a common kappa");
        }
      }
      require(kappa < 1.0, ErrorCode::NotElliptic, "Clifford parameter kappa must be below 1");
      r.value = (N - trPi) + std::pow(1.0 - kappa, -0.5 * d) * trPi;
      r.error = 1e-15 * N * r.value;
      return r;
    }
    case GammaMethod::Quadrature:
      break;
  }
  // x = sigma y with the weight exp(-|y|^2) matching the slowest sampled Gaussian direction.
  const double sigma2 = 1.0 / (1.0 - tangential_bounds(g).max_sampled);
  const double sigma = std::sqrt(sigma2);
  const auto integrate = [&](int order) {
    std::vector<double> x(d);
    const double v = num::gauss_hermite_tensor(d, order, [&](std::span<const double> y) {
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) {
        x[a] = sigma * y[a];
        r2 += y[a] * y[a];
      }
      const auto mu = minus_t2_eigs(g, x);
      double tr = 0.0;
      for (int k = 0; k < N; ++k) tr += std::exp(mu(k) - (sigma2 - 1.0) * r2);
      return tr;
    });
    return v * std::pow(sigma2 / kPi, 0.5 * d);
  };
  int order = 8;
  double prev = integrate(order);
  const int max_order = d >= 3 ? 96 : 256;
  while (true) {
    const int next = std::min(2 * order, max_order);
    if (next == order) {
      fail(ErrorCode::QuadratureFailure, "Gauss-Hermite rule did not converge; last change " +
                                             std::to_string(std::abs(prev - integrate(order / 2))));
    }
    const double cur = integrate(next);
    order = next;
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) {
      r.value = cur;
      r.error = std::abs(cur - prev);
      r.order = order;
      return r;
    }
    prev = cur;
  }
}

double ggs_a1(double gamma, int N, double boundary_vol, double tr_Pi) {
  return boundary_vol * 0.5 * kSqrtPi * (2.0 * tr_Pi - 3.0 * N + 2.0 * gamma);
}

double ggs_a1(const ObliqueSymbol& sym, double boundary_vol, GammaMethod method) {
  const auto r = ggs_gamma(sym, method);
  return ggs_a1(r.value, sym.N(), boundary_vol, sym.Pi.trace().real());
}

}  // namespace speclab
