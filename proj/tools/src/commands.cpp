#include "speclab_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <thread>

#include "speclab/errors.hpp"
#include "speclab/heatdet.hpp"
#include "speclab/invariants.hpp"
#include "speclab/magnetic.hpp"
#include "speclab/mellin.hpp"
#include "speclab/models.hpp"
#include "speclab/nonlaplace.hpp"
#include "speclab/relative.hpp"
#include "speclab/traces.hpp"
#include "speclab/weyl.hpp"
#include "speclab_cli/instances.hpp"

namespace speclab::cli {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::InvalidArgument, msg); }

double closed_form_error(double v) { return 1e-14 * std::abs(v); }

Json to_ordered(const nlohmann::json& j) { return Json::parse(j.dump()); }

Json list_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json matrix_json(const MatrixXd& m) {
  Json a = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

std::vector<std::vector<double>> product(const std::vector<std::vector<double>>& axes) {
  std::vector<std::vector<double>> out{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out) {
      for (double v : axis) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    }
    out = std::move(next);
  }
  return out;
}

double relative_discrepancy(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Reads job entries and remembers which ones were consumed.
class Ctx {
 public:
  Ctx(const JobSpec& job, int threads) : job_(job), threads_(threads) {}

  const JobSpec& job() const { return job_; }
  int threads() const { return threads_; }

  bool has(const std::string& key) const { return job_.params.count(key) != 0; }

  std::string str(const std::string& key, const std::string& def) {
    used_params_.insert(key);
    const auto it = job_.params.find(key);
    return it == job_.params.end() ? def : it->second;
  }

  double real(const std::string& key, double def) {
    return has(key) ? parse_real(str(key, ""), key) : (used_params_.insert(key), def);
  }

  long integer(const std::string& key, long def) {
    if (!has(key)) return def;
    const std::string s = str(key, "");
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) bad("'" + s + "' is not an integer (" + key + ")");
    return v;
  }

  bool flag(const std::string& key, bool def) {
    if (!has(key)) return def;
    const std::string s = str(key, "");
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    bad("'" + s + "' is not a boolean (" + key + ")");
  }

  std::vector<double> list(const std::string& key, std::vector<double> def) {
    return has(key) ? parse_real_list(str(key, ""), key) : (used_params_.insert(key), def);
  }

  VectorXd vector(const std::string& key, int n, double fill = 0.0) {
    const auto v = list(key, std::vector<double>(static_cast<size_t>(n), fill));
    if (static_cast<int>(v.size()) != n) bad(key + " needs " + std::to_string(n) + " entries");
    return Eigen::Map<const VectorXd>(v.data(), n);
  }

  /// Row-major n x n matrix; identity by default.
  MatrixXd matrix(const std::string& key, int n) {
    if (!has(key)) return MatrixXd::Identity(n, n);
    const auto v = list(key, {});
    if (static_cast<int>(v.size()) != n * n) bad(key + " needs " + std::to_string(n * n) + " entries");
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(v.data(), n, n);
  }

  std::vector<double> grid(const std::string& key, std::vector<double> def, bool positive = true) {
    used_grid_.insert(key);
    const auto it = job_.grid.find(key);
    const auto v = it == job_.grid.end() ? def : it->second;
    if (v.empty()) bad("grid '" + key + "' is empty");
    for (double x : v) {
      if (positive && !(x > 0.0)) bad("grid '" + key + "' must be strictly positive");
    }
    return v;
  }

  double tol(const std::string& key, double def) {
    used_tol_.insert(key);
    const auto it = job_.tolerances.find(key);
    return it == job_.tolerances.end() ? def : it->second;
  }

  ModelOperator model(const std::string& name = "") {
    used_models_.insert(name);
    const auto it = job_.models.find(name);
    const std::string label = name.empty() ? "[model]" : "[model." + name + "]";
    if (it == job_.models.end()) bad("missing " + label + " section");
    return parse_model(it->second, label);
  }

  TracePair pair() { return {model("plus"), model("minus"), real("mass", 0.0)}; }

  void check_unused() const {
    for (const auto& [k, v] : job_.params) {
      if (!used_params_.count(k)) bad("parameter '" + k + "' is not used by " + job_.command);
    }
    for (const auto& [k, v] : job_.grid) {
      if (!used_grid_.count(k)) bad("grid '" + k + "' is not used by " + job_.command);
    }
    for (const auto& [k, v] : job_.tolerances) {
      if (!used_tol_.count(k)) bad("tolerance '" + k + "' is not used by " + job_.command);
    }
    for (const auto& [k, v] : job_.models) {
      if (!used_models_.count(k)) bad("model section '" + k + "' is not used by " + job_.command);
    }
  }

 private:
  static ModelOperator parse_model(const KeyValues& kv, const std::string& label) {
    std::set<std::string> used{"kind"};
    auto get = [&](const std::string& k) -> const std::string* {
      used.insert(k);
      const auto it = kv.find(k);
      return it == kv.end() ? nullptr : &it->second;
    };
    auto real = [&](const std::string& k, double def) {
      const auto* v = get(k);
      return v ? parse_real(*v, k) : def;
    };
    auto bc = [&](const std::string& side) {
      const auto* v = get(side);
      const std::string kind = v ? *v : "dirichlet";
      if (kind == "dirichlet") return BC::dirichlet();
      if (kind == "neumann") return BC::neumann();
      if (kind == "robin") return BC::robin(real(side + "_s", 0.0));
      bad("unknown boundary condition '" + kind + "'");
    };
    const auto kit = kv.find("kind");
    if (kit == kv.end()) bad(label + " needs a kind");
    const std::string& kind = kit->second;
    ModelOperator out;
    if (kind == "circle") {
      out = Circle{real("radius", 1.0), real("twist", 0.0), real("mass2", 0.0)};
    } else if (kind == "torus") {
      FlatTorus t;
      const auto* metric = get("metric");
      int n = static_cast<int>(real("dim", 2.0));
      if (metric) {
        const auto v = parse_real_list(*metric, "metric");
        n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
        if (n * n != static_cast<int>(v.size())) bad("torus metric needs n^2 entries");
        t.inverse_metric = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            v.data(), n, n);
      } else {
        if (n < 1) bad("torus dim must be positive");
        t.inverse_metric = MatrixXd::Identity(n, n);
      }
      const auto* tw = get("twist");
      t.twist = VectorXd::Zero(n);
      if (tw) {
        const auto v = parse_real_list(*tw, "twist");
        if (static_cast<int>(v.size()) != n) bad("torus twist needs one entry per dimension");
        t.twist = Eigen::Map<const VectorXd>(v.data(), n);
      }
      t.mass2 = real("mass2", 0.0);
      out = t;
    } else if (kind == "interval") {
      out = Interval{real("length", 1.0), bc("left"), bc("right")};
    } else if (kind == "sphere") {
      out = Sphere2{real("radius", 1.0)};
    } else if (kind == "landau") {
      out = Landau{real("field", 1.0), real("mass2", 0.0)};
    } else if (kind == "dirac") {
      out = DiracCircle{real("frame", 1.0), real("twist", 0.0)};
    } else {
      bad("unknown model kind '" + kind + "'");
    }
    for (const auto& [k, v] : kv) {
      if (!used.count(k)) bad(label + ": key '" + k + "' does not apply to a " + kind);
    }
    validate(out);
    return out;
  }

  const JobSpec& job_;
  int threads_;
  std::set<std::string> used_params_, used_grid_, used_tol_, used_models_;
};

Output start(const Ctx& c, const std::string& default_action) {
  Output out;
  out.command = c.job().command;
  out.action = c.job().action.empty() ? default_action : c.job().action;
  return out;
}

void bad_action(const Output& out) { bad("unknown action '" + out.action + "' for " + out.command); }

/// Rows over the product of named grids; `f` gets the point and fills value fields.
template <class F>
std::vector<Row> sweep(Ctx& c, const std::vector<std::pair<std::string, std::vector<double>>>& axes, F f) {
  std::vector<std::vector<double>> values;
  for (const auto& a : axes) values.push_back(a.second);
  const auto points = product(values);
  return parallel_rows(
      points.size(),
      [&](size_t i) {
        Row r;
        for (size_t k = 0; k < axes.size(); ++k) r.inputs[axes[k].first] = points[i][k];
        f(points[i], r);
        return r;
      },
      c.threads());
}

void fill(Row& r, const TraceResult& t) {
  r.value = t.value;
  r.error_bound = t.error_bound;
  r.method = t.method;
}

void fill(Row& r, const PairValue& t) {
  r.value = t.value;
  r.error_bound = t.error_bound;
  r.method = t.method;
}

// ---------------------------------------------------------------- classical

Output cmd_spectrum(Ctx& c) {
  Output out = start(c, "eigenvalues");
  if (out.action != "eigenvalues") bad_action(out);
  const ModelOperator model = c.model();
  const double cutoff = c.real("cutoff", 50.0);
  const Spectrum spec = std::holds_alternative<DiracCircle>(model)
                            ? dirac_eigenvalues(std::get<DiracCircle>(model), cutoff)
                            : eigenvalues(model, cutoff);
  const bool roots = std::holds_alternative<Interval>(model) &&
                     (std::get<Interval>(model).left.kind == BC::Kind::Robin ||
                      std::get<Interval>(model).right.kind == BC::Kind::Robin);
  for (size_t k = 0; k < spec.entries.size(); ++k) {
    Row r;
    r.inputs["index"] = static_cast<long>(k);
    r.inputs["cutoff"] = cutoff;
    r.value = spec.entries[k].lambda;
    r.error_bound = roots ? 1e-12 * std::max(1.0, std::abs(r.value)) : closed_form_error(r.value);
    r.method = roots ? "root-finding" : "closed-form";
    r.paper_eq = "L phi_k = lambda_k phi_k";
    r.extra = {{"multiplicity", spec.entries[k].multiplicity}, {"per_unit_volume", spec.per_unit_volume}};
    out.rows.push_back(r);
  }
  return out;
}

TraceMethod trace_method(const std::string& s) {
  if (s == "auto") return TraceMethod::Auto;
  if (s == "direct") return TraceMethod::Direct;
  if (s == "theta") return TraceMethod::Theta;
  bad("unknown trace method '" + s + "'");
}

Output cmd_trace(Ctx& c) {
  Output out = start(c, "heat");
  if (out.action != "heat") bad_action(out);
  const HeatTrace trace(c.model());
  const TraceMethod method = trace_method(c.str("method", "auto"));
  out.rows = sweep(c, {{"t", c.grid("t", {1.0})}}, [&](const std::vector<double>& p, Row& r) {
    fill(r, trace(p[0], method));
    r.paper_eq = "Theta(t) = Tr exp(-t L) = sum_k exp(-t lambda_k)";
  });
  return out;
}

/// "direct", "integral" or "both" (direct value, integral value and discrepancy in extra).
template <class Eval>
void dual_path(Row& r, const std::string& path, Eval eval) {
  if (path == "direct" || path == "integral") {
    fill(r, eval(path == "direct" ? SumPath::Direct : SumPath::Integral));
    return;
  }
  if (path != "both") bad("path must be direct, integral or both");
  const TraceResult d = eval(SumPath::Direct);
  const TraceResult i = eval(SumPath::Integral);
  fill(r, d);
  r.method = d.method + "+" + i.method;
  r.extra = {{"integral", i.value},
             {"integral_error", i.error_bound},
             {"discrepancy", relative_discrepancy(d.value, i.value)}};
}

/// Spectrum deep enough for direct sums of exp(-beta sqrt(lambda)) at the smallest beta.
HeatTrace sqrt_trace(Ctx& c, const ModelOperator& model, const std::vector<double>& betas) {
  const double beta_min = *std::min_element(betas.begin(), betas.end());
  const double cutoff = c.real("cutoff", 0.0);
  if (cutoff > 0.0) return HeatTrace(model, cutoff);
  return HeatTrace(model, std::max(heat_cutoff(model, 1.0), sqrt_cutoff(model, beta_min)));
}

Output cmd_rtrace(Ctx& c) {
  Output out = start(c, "relativistic");
  if (out.action != "relativistic") bad_action(out);
  const ModelOperator model = c.model();
  const auto betas = c.grid("beta", {1.0});
  const HeatTrace trace = sqrt_trace(c, model, betas);
  const std::string path = c.str("path", "direct");
  out.rows = sweep(c, {{"beta", betas}}, [&](const std::vector<double>& p, Row& r) {
    dual_path(r, path, [&](SumPath sp) { return relativistic_trace(trace, p[0], sp); });
    r.paper_eq = "Theta_r(beta) = Tr exp(-beta L^{1/2}) = int dt h_0(t) Theta(t beta^2)";
  });
  return out;
}

Output cmd_qtrace(Ctx& c) {
  Output out = start(c, "occupation");
  if (out.action != "occupation") bad_action(out);
  const ModelOperator model = c.model();
  const auto betas = c.grid("beta", {1.0});
  const HeatTrace trace = sqrt_trace(c, model, betas);
  const Statistics stats = statistics_from_string(c.str("statistics", "bose"));
  const std::string path = c.str("path", "direct");
  out.rows = sweep(c, {{"beta", betas}, {"mu", c.grid("mu", {0.0}, false)}},
                   [&](const std::vector<double>& p, Row& r) {
                     dual_path(r, path, [&](SumPath sp) { return quantum_trace(trace, p[0], p[1], stats, sp); });
                     r.inputs["statistics"] = to_string(stats);
                     r.paper_eq = "Tr (exp(beta (L^{1/2} - mu)) -+ 1)^{-1} = int dt h(t; beta mu) Theta(t beta^2)";
                   });
  return out;
}

SpectralQuery query(Ctx& c) { return {c.real("shift", 0.0), c.flag("exclude_zero_modes", false)}; }

Output cmd_aq(Ctx& c) {
  Output out = start(c, "value");
  if (out.action != "value" && out.action != "derivative") bad_action(out);
  const ModelOperator model = c.model();
  const int order = static_cast<int>(c.integer("series_order", 6));
  const double q_im = c.real("q_im", 0.0);
  if (out.action == "derivative") {
    out.rows = sweep(c, {{"q", c.grid("q", {0.0}, false)}}, [&](const std::vector<double>& p, Row& r) {
      r.value = a_q_derivative(model, p[0], order);
      r.error_bound = 1e-8 * std::max(1.0, std::abs(r.value));
      r.method = "complex-step";
      r.paper_eq = "d/dq A_q";
    });
    return out;
  }
  const SpectralQuery sq = query(c);
  out.rows = sweep(c, {{"q", c.grid("q", {0.0}, false)}}, [&](const std::vector<double>& p, Row& r) {
    const AqResult a = a_q(model, {p[0], q_im}, order, sq);
    r.inputs["q_im"] = q_im;
    r.value = a.value.real();
    r.value_im = a.value.imag();
    r.error_bound = a.error;
    r.method = "mellin-split";
    r.paper_eq = "A_q = (4 pi)^{n/2} Gamma(-q)^{-1} int_0^inf dt t^{-q-1+n/2} Theta(t)";
    r.extra = {{"split_point", a.split_point}};
  });
  return out;
}

Output cmd_zeta(Ctx& c) {
  Output out = start(c, "value");
  if (out.action != "value") bad_action(out);
  const ModelOperator model = c.model();
  const std::string m = c.str("method", "auto");
  ZetaMethod method = ZetaMethod::Auto;
  if (m == "direct") {
    method = ZetaMethod::Direct;
  } else if (m == "continuation") {
    method = ZetaMethod::Continuation;
  } else if (m != "auto") {
    bad("zeta method must be auto, direct or continuation");
  }
  const double s_im = c.real("s_im", 0.0);
  const double cutoff = c.real("direct_cutoff", 1e10);
  const SpectralQuery sq = query(c);
  out.rows = sweep(c, {{"s", c.grid("s", {2.0}, false)}}, [&](const std::vector<double>& p, Row& r) {
    const ZetaResult z = zeta(model, {p[0], s_im}, sq, method, cutoff);
    r.inputs["s_im"] = s_im;
    r.value = z.value.real();
    r.value_im = z.value.imag();
    r.error_bound = z.error;
    r.method = z.method;
    r.paper_eq = "zeta(s) = sum_k lambda_k^{-s} = Gamma(s)^{-1} int_0^inf dt t^{s-1} Theta(t)";
  });
  return out;
}

Output cmd_logdet(Ctx& c) {
  Output out = start(c, "value");
  if (out.action != "value") bad_action(out);
  const ModelOperator model = c.model();
  const SpectralQuery sq = query(c);
  const LogDetResult d = log_det(model, sq);
  Row r;
  r.inputs["shift"] = sq.shift;
  r.inputs["exclude_zero_modes"] = sq.exclude_zero_modes;
  r.value = d.log_det;
  r.error_bound = d.error;
  r.method = "richardson-derivative";
  r.paper_eq = "log Det L = -zeta'(0)";
  r.extra = {{"det", d.det}};
  out.rows.push_back(r);
  return out;
}

Output cmd_coeffs(Ctx& c) {
  Output out = start(c, "standard");
  const ModelOperator model = c.model();
  if (out.action == "standard") {
    const long kmax = c.integer("k_max", 2);
    if (kmax < 0 || kmax > 12) bad("k_max must lie in [0, 12]");
    std::vector<double> ks;
    for (long k = 0; k <= kmax; ++k) ks.push_back(static_cast<double>(k));
    out.rows = sweep(c, {{"k", ks}}, [&](const std::vector<double>& p, Row& r) {
      r.value = standard_coefficient(model, static_cast<int>(p[0]));
      r.error_bound = 1e-8 * std::max(1.0, std::abs(r.value));
      r.method = "mellin-residue";
      r.paper_eq = "a_k = (-1)^k / k! A_q at q = k";
    });
  } else if (out.action == "geometric") {
    const auto series = predicted_trace_coeffs(geometry_of(model));
    for (const auto& t : series.terms()) {
      Row r;
      r.inputs["power"] = t.power;
      r.inputs["log_power"] = t.log_power;
      r.value = t.coefficient;
      r.error_bound = closed_form_error(t.coefficient);
      r.method = "closed-form";
      r.paper_eq = "Theta(t) ~ (4 pi t)^{-n/2} (A_0 + A_1 t^{1/2} + A_2 t); A_2 = int (N R/6 - tr Q) + int (N K/3 + 2 tr Pi S)";
      out.rows.push_back(r);
    }
  } else {
    bad_action(out);
  }
  return out;
}

// ---------------------------------------------------------------- boundary and symbols

Output cmd_ggs_gamma(Ctx& c) {
  Output out = start(c, "random");
  if (out.action != "random") bad_action(out);
  const int n = static_cast<int>(c.integer("n", 3));
  const int N = static_cast<int>(c.integer("N", 2));
  const std::string instance = c.str("instance", "clifford");
  const double kappa = c.real("kappa", 0.5);
  const long seed = c.integer("seed", 1);
  const long count = c.integer("count", 1);
  const double rel_tol = c.tol("rel_tol", 1e-10);
  if (count < 1 || count > 10000) bad("count must lie in [1, 10000]");
  if (instance != "commuting" && instance != "clifford") bad("instance must be commuting or clifford");
  const GammaMethod closed = instance == "commuting" ? GammaMethod::Commuting : GammaMethod::Clifford;
  out.rows = parallel_rows(
      static_cast<size_t>(count),
      [&](size_t i) {
        const auto s = static_cast<std::uint64_t>(seed) + i;
        const ObliqueSymbol sym =
            instance == "commuting" ? random_commuting_symbol(n, N, s) : random_clifford_symbol(n, N, kappa, s);
        const GammaResult q = ggs_gamma(sym, GammaMethod::Quadrature, rel_tol);
        const GammaResult cf = ggs_gamma(sym, closed);
        const double trPi = sym.Pi.trace().real();
        Row r;
        r.inputs = {{"n", n}, {"N", N}, {"instance", instance}, {"seed", static_cast<long>(s)}};
        if (instance == "clifford") r.inputs["kappa"] = kappa;
        r.value = q.value;
        r.error_bound = q.error;
        r.method = "gauss-hermite";
        r.paper_eq = "gamma = int dxi pi^{-(n-1)/2} tr exp(-|xi|^2 - T(xi)^2)";
        r.extra = {{"closed_form", cf.value},
                   {"closed_method", cf.method},
                   {"discrepancy", relative_discrepancy(q.value, cf.value)},
                   {"order", q.order},
                   {"tr_Pi", trPi},
                   {"a1_per_volume", ggs_a1(q.value, N, 1.0, trPi)}};
        return r;
      },
      c.threads());
  return out;
}

MatrixXd potential(Ctx& c, int N) { return c.has("potential") ? c.matrix("potential", N) : MatrixXd::Zero(N, N); }

ConstantSymbol symbol_of(Ctx& c) {
  const int n = static_cast<int>(c.integer("n", 2));
  if (n < 1) bad("n must be positive");
  if (c.has("h")) {
    const auto h = c.list("h", {});
    const int N = static_cast<int>(h.size());
    const MatrixXd Q = potential(c, N);
    return ConstantSymbol::diagonal(n, Eigen::Map<const VectorXd>(h.data(), N), Q.cast<cplx>());
  }
  const int N = static_cast<int>(c.integer("N", 1));
  if (N < 1) bad("N must be positive");
  const MatrixXd g = c.matrix("g", n);
  const MatrixXd Q = potential(c, N);
  return ConstantSymbol::scalar(g, N, Q.cast<cplx>());
}

Output cmd_nonlaplace(Ctx& c) {
  Output out = start(c, "a0");
  const ConstantSymbol sym = symbol_of(c);
  const double rel_tol = c.tol("rel_tol", out.action == "dirichlet-a1" ? 1e-8 : 1e-10);
  auto single = [&](const DensityResult& d, const std::string& eq) {
    Row r;
    r.inputs = {{"n", sym.n}, {"N", sym.N}};
    r.value = d.value;
    r.error_bound = d.error;
    r.method = "gauss-hermite";
    r.paper_eq = eq;
    r.extra = {{"order", d.order}};
    out.rows.push_back(r);
  };
  if (out.action == "a0") {
    single(a0_density(sym, rel_tol), "A_0 density = int dxi pi^{-n/2} tr exp(-H(xi))");
  } else if (out.action == "a2") {
    single(a2_density(sym, rel_tol),
           "A_2 density = -int dxi pi^{-n/2} tr int_0^1 dtau exp(-(1-tau) H) Q exp(-tau H)");
  } else if (out.action == "dirichlet-a1") {
    single(dirichlet_a1(sym, rel_tol), "A_1 density = -sqrt(pi) int dxi' pi^{-(n-1)/2} Psi(xi')");
    out.rows.back().method = "contour+quadrature";
  } else if (out.action == "psi") {
    const VectorXd xi = c.vector("xi", sym.n - 1);
    out.rows = sweep(c, {{"t", c.grid("t", {1.0})}}, [&](const std::vector<double>& p, Row& r) {
      PsiOptions opt;
      opt.t = p[0];
      opt.rel_tol = rel_tol;
      const auto d = dirichlet_psi(sym, std::span<const double>(xi.data(), static_cast<size_t>(xi.size())), opt);
      r.inputs["xi"] = list_json(std::vector<double>(xi.data(), xi.data() + xi.size()));
      r.value = d.value;
      r.error_bound = d.error;
      r.method = "resolvent-contour";
      r.paper_eq = "Psi = (2 pi i)^{-1} int dlambda exp(-t lambda) d/dlambda log det Phi(lambda)";
    });
  } else {
    bad_action(out);
  }
  return out;
}

// ---------------------------------------------------------------- magnetic

/// F = b J unless an explicit field matrix is given.
struct FieldSpec {
  int n = 2;
  std::optional<MatrixXd> field;

  MagneticModel at(double b) const {
    MagneticModel m;
    m.F = field ? *field : symplectic(n, b);
    return m;
  }
};

Output cmd_magnetic(Ctx& c) {
  Output out = start(c, "landau");
  if (out.action == "landau") {
    out.rows = sweep(c, {{"b", c.grid("b", {1.0})}, {"t", c.grid("t", {1.0})}}, [&](const std::vector<double>& p, Row& r) {
      const LandauCheck lc = landau_check(p[0], p[1]);
      r.value = lc.diagonal;
      r.error_bound = closed_form_error(lc.diagonal);
      r.method = "closed-form";
      r.paper_eq = "U(t; x, x) = B / (4 pi sinh(t B))";
      r.extra = {{"level_sum", lc.level_sum}, {"discrepancy", lc.difference}, {"levels", lc.levels}};
    });
    return out;
  }
  const int n = static_cast<int>(c.integer("n", 2));
  FieldSpec fs{n, {}};
  if (c.has("f")) fs.field = c.matrix("f", n);
  const auto b_axis =
      std::pair<std::string, std::vector<double>>{"b", fs.field ? std::vector<double>{0.0} : c.grid("b", {1.0})};
  if (out.action == "u0") {
    const VectorXd x = c.vector("x", n), xp = c.vector("xp", n);
    out.rows = sweep(c, {b_axis, {"t", c.grid("t", {1.0})}}, [&](const std::vector<double>& p, Row& r) {
      r.value = u0_kernel(fs.at(p[0]), p[1], x, xp);
      r.error_bound = closed_form_error(r.value);
      r.method = "closed-form";
      r.paper_eq = "U_0 = (4 pi t)^{-n/2} det(t iF / sinh(t iF))^{1/2} exp(-<u, t iF coth(t iF) u> / 4t)";
    });
  } else if (out.action == "h") {
    out.rows = sweep(c, {b_axis, {"t", c.grid("t", {1.0})}}, [&](const std::vector<double>& p, Row& r) {
      const MatrixXd h = h_tensor(fs.at(p[0]), p[1]);
      r.value = h(0, 1);
      r.error_bound = closed_form_error(r.value);
      r.method = "eigen-decomposition";
      r.paper_eq = "i h = coth(t iF) - (t iF)^{-1}";
      r.extra = {{"h", matrix_json(h)}};
    });
  } else if (out.action == "b2") {
    const double rb = c.real("r", 1.0);
    const double scalar = c.real("scalar_r", 0.0);
    out.rows = sweep(c, {b_axis, {"t", c.grid("t", {1.0}, false)}}, [&](const std::vector<double>& p, Row& r) {
      MagneticModel m = fs.at(p[0]);
      m.bundle_curv.assign(static_cast<size_t>(n * n), MatrixXcd::Zero(1, 1));
      m.bundle_curv[1](0, 0) = cplx(0.0, rb);
      m.bundle_curv[static_cast<size_t>(n)](0, 0) = cplx(0.0, -rb);
      const MatrixXcd b2 = b2_leading(m, scalar, p[1]);
      r.inputs["r"] = rb;
      r.value = b2(0, 0).real();
      r.value_im = b2(0, 0).imag();
      r.error_bound = closed_form_error(std::abs(b2(0, 0)));
      r.method = "closed-form";
      r.paper_eq = "b_2 = (1/2) H^{mu nu} R_{mu nu}";
    });
  } else {
    bad_action(out);
  }
  return out;
}

// ---------------------------------------------------------------- relative invariants

CombinedTrace which_trace(Ctx& c) {
  const std::string w = c.str("which", "x");
  if (w == "x") return CombinedTrace::X;
  if (w == "y") return CombinedTrace::Y;
  bad("which must be x or y");
}

/// A grid entry that must hold exactly one value (fixed times of an epsilon sweep).
double single(Ctx& c, const std::string& key) {
  const auto v = c.grid(key, {1.0});
  if (v.size() != 1) bad("'" + key + "' takes a single value here");
  return v.front();
}

std::vector<double> default_eps() { return {1e-3, 1.5e-3, 2e-3, 3e-3, 5e-3, 7e-3, 1e-2}; }

Output cmd_relative(Ctx& c) {
  Output out = start(c, "x");
  const TracePair pair = c.pair();
  if (out.action == "theorem1") {
    const double t = single(c, "t"), s = single(c, "s");
    const CombinedTrace which = which_trace(c);
    const Theorem1Fit fit = theorem1_leading_fit(pair, t, s, c.grid("eps", default_eps()), which);
    const auto* c0 = fit.series.find(0.0);
    Row r;
    r.inputs = {{"t", t}, {"s", s}, {"which", which == CombinedTrace::X ? "x" : "y"}};
    r.value = fit.fitted;
    r.error_bound = c0 ? c0->error : 0.0;
    r.method = "least-squares";
    r.paper_eq = which == CombinedTrace::X ? "B_0(t, s) = int dx g^{1/2}(t, s) N"
                                           : "C_0(t, s) = int dx (N/2) g^{1/2}(t, s) e_+ g(t, s) e_-";
    r.extra = {{"predicted", fit.predicted}, {"discrepancy", relative_discrepancy(fit.fitted, fit.predicted)}};
    out.rows.push_back(r);
    nlohmann::json sj;
    to_json(sj, fit.series);
    out.series = to_ordered(sj);
    return out;
  }
  using Fn = PairValue (*)(const TracePair&, double, double);
  Fn fn = nullptr;
  std::string eq;
  if (out.action == "x") {
    fn = combined_trace_X;
    eq = "X(t, s) = Tr exp(-t L_+) exp(-s L_-)";
  } else if (out.action == "y") {
    fn = combined_trace_Y;
    eq = "Y(t, s) = Tr D_+ exp(-t D_+^2) D_- exp(-s D_-^2)";
  } else if (out.action == "psi") {
    fn = relative_psi;
    eq = "Psi(t, s) = Tr (exp(-t L_+) - exp(-t L_-)) (exp(-s L_+) - exp(-s L_-))";
  } else if (out.action == "phi") {
    fn = relative_phi;
    eq = "Phi(t, s) = Tr (D_+ exp(-t D_+^2) - D_- exp(-t D_-^2)) (D_+ exp(-s D_+^2) - D_- exp(-s D_-^2))";
  } else {
    bad_action(out);
  }
  out.rows = sweep(c, {{"t", c.grid("t", {1.0})}, {"s", c.grid("s", {1.0})}}, [&](const std::vector<double>& p, Row& r) {
    fill(r, fn(pair, p[0], p[1]));
    r.paper_eq = eq;
  });
  return out;
}

Output cmd_bogolyubov(Ctx& c) {
  Output out = start(c, "value");
  const TracePair pair = c.pair();
  const Statistics stats = statistics_from_string(c.str("statistics", "bose"));
  const std::string eq =
      stats == Statistics::Fermi
          ? "B_f = beta^2 Tr [(D_+ / sinh(beta H_+) - D_- / sinh(beta H_-))^2 + m^2 (1/sinh(beta H_+) - "
            "1/sinh(beta H_-))^2], H = (D^2 + m^2)^{1/2}"
          : "B_b = Tr (f(beta H_+) - f(beta H_-)) (b(beta H_+) - b(beta H_-)), f = 1/(e^x + 1), b = 1/(e^x - 1), "
            "H = (L + m^2)^{1/2}";
  if (out.action == "exponent") {
    const std::string m = c.str("method", "spectral");
    const auto betas = c.grid("beta", {0.05, 0.07, 0.1, 0.14, 0.2, 0.28, 0.4});
    const ExponentFit fit = bogolyubov_exponent_fit(pair, betas, stats, bogolyubov_method_from_string(m));
    Row r;
    r.inputs = {{"beta_min", *std::min_element(betas.begin(), betas.end())},
                {"beta_max", *std::max_element(betas.begin(), betas.end())},
                {"points", static_cast<long>(betas.size())},
                {"statistics", to_string(stats)}};
    r.value = fit.exponent;
    r.error_bound = fit.residual;
    r.method = "variable-projection";
    r.paper_eq = "B(beta) ~ A beta^{-n} as beta -> 0";
    r.extra = {{"amplitude", fit.amplitude}, {"expected", -static_cast<double>(dimension(pair))}};
    out.rows.push_back(r);
    return out;
  }
  if (out.action != "value") bad_action(out);
  const std::string method = c.str("method", "both");
  const double rel_tol = c.tol("rel_tol", 1e-9);
  out.rows = sweep(c, {{"beta", c.grid("beta", {1.0})}}, [&](const std::vector<double>& p, Row& r) {
    r.inputs["statistics"] = to_string(stats);
    r.paper_eq = eq;
    if (method != "both") {
      fill(r, bogolyubov(pair, p[0], stats, bogolyubov_method_from_string(method), rel_tol));
      return;
    }
    const PairValue s = bogolyubov(pair, p[0], stats, BogolyubovMethod::Spectral, rel_tol);
    const PairValue k = bogolyubov(pair, p[0], stats, BogolyubovMethod::Kernel, rel_tol);
    fill(r, s);
    r.method = "spectral+kernel";
    r.extra = {{"spectral", s.value},
               {"kernel", k.value},
               {"kernel_error", k.error_bound},
               {"discrepancy", relative_discrepancy(s.value, k.value)}};
  });
  return out;
}

// ---------------------------------------------------------------- heat determinant

Output cmd_heatdet(Ctx& c) {
  Output out = start(c, "spectral");
  const ModelOperator model = c.model();
  const int n = dimension(model);
  if (out.action == "spectral") {
    const long budget = c.integer("budget", 50'000'000);
    out.rows = sweep(c, {{"t", c.grid("t", {1.0})}}, [&](const std::vector<double>& p, Row& r) {
      const HeatDetResult h = heat_det(model, p[0], budget);
      r.value = h.value;
      r.error_bound = h.error_bound;
      r.method = h.method;
      r.paper_eq = "K(t) = (1/n!) sum exp(-t sum_i (lambda_{k_i} + lambda_{l_i})) |Psi^{k}_{l}|^2";
      r.extra = {{"terms", h.terms}};
    });
  } else if (out.action == "defining") {
    const double rel_tol = c.tol("rel_tol", 1e-12);
    out.rows = sweep(c, {{"t", c.grid("t", {1.0})}}, [&](const std::vector<double>& p, Row& r) {
      const HeatDetResult h = heat_det_defining(model, p[0], rel_tol);
      const HeatDetResult s = heat_det(model, p[0]);
      r.value = h.value;
      r.error_bound = h.error_bound;
      r.method = h.method;
      r.paper_eq = "K(t) = int dx dx' conj(U(t; x, x')) d_x d_x' U(t; x, x')";
      r.extra = {{"spectral", s.value}, {"discrepancy", relative_discrepancy(h.value, s.value)}};
    });
  } else if (out.action == "leading") {
    Row r;
    r.inputs = {{"n", n}, {"N", 1}, {"vol", volume(model)}};
    r.value = heat_det_leading(n, 1, volume(model));
    r.error_bound = closed_form_error(r.value);
    r.method = "closed-form";
    r.paper_eq = "K(t) ~ (1/2) N^n (4 pi)^{-n^2} (pi/2n)^{n/2} vol t^{-n(n+1/2)}";
    r.extra = {{"order", heat_det_order(n)}};
    out.rows.push_back(r);
  } else if (out.action == "correlators") {
    const int cutoff = static_cast<int>(c.integer("cutoff", 2));
    for (const auto& e : correlators(model, cutoff)) {
      Row r;
      Json ks = Json::array(), ls = Json::array();
      for (const auto& k : e.k) ks.push_back(std::vector<int>(k.data(), k.data() + k.size()));
      for (const auto& l : e.l) ls.push_back(std::vector<int>(l.data(), l.data() + l.size()));
      r.inputs = {{"k", ks}, {"l", ls}};
      r.value = e.value.real();
      r.value_im = e.value.imag();
      r.error_bound = closed_form_error(std::abs(e.value));
      r.method = "closed-form";
      r.paper_eq = "Psi^{k_1..k_n}_{l_1..l_n} = int Phi^{k_1}_{l_1} ^ ... ^ Phi^{k_n}_{l_n}";
      out.rows.push_back(r);
    }
  } else {
    bad_action(out);
  }
  return out;
}

// ---------------------------------------------------------------- Weyl algebra

struct WeylSpec {
  int n = 2;
  MatrixXd g_plus, g_minus;
  bool r_plus_fixed = false, r_minus_fixed = false;
  MatrixXd r_plus, r_minus;

  WeylPair at(double b) const {
    return {{g_plus, r_plus_fixed ? r_plus : symplectic(n, b)}, {g_minus, r_minus_fixed ? r_minus : symplectic(n, b)}};
  }
};

WeylSpec weyl_spec(Ctx& c) {
  WeylSpec w;
  w.n = static_cast<int>(c.integer("n", 2));
  if (w.n < 1) bad("n must be positive");
  const MatrixXd g = c.matrix("g", w.n);
  w.g_plus = c.has("g_plus") ? c.matrix("g_plus", w.n) : g;
  w.g_minus = c.has("g_minus") ? c.matrix("g_minus", w.n) : g;
  auto curvature = [&](const std::string& side, bool& fixed, MatrixXd& R) {
    if (c.has("r_" + side)) {
      fixed = true;
      R = c.matrix("r_" + side, w.n);
    } else if (c.has("b_" + side)) {
      fixed = true;
      R = symplectic(w.n, c.real("b_" + side, 0.0));
    }
  };
  curvature("plus", w.r_plus_fixed, w.r_plus);
  curvature("minus", w.r_minus_fixed, w.r_minus);
  return w;
}

DensityMode density_mode(const std::string& s) {
  if (s == "auto") return DensityMode::Auto;
  if (s == "integrated") return DensityMode::Integrated;
  if (s == "per-volume") return DensityMode::PerVolume;
  bad("density mode must be auto, integrated or per-volume");
}

Output cmd_weyl(Ctx& c) {
  Output out = start(c, "convolve");
  const WeylSpec w = weyl_spec(c);
  const bool needs_b = !(w.r_plus_fixed && w.r_minus_fixed);
  const auto b_axis = std::pair<std::string, std::vector<double>>{"b", needs_b ? c.grid("b", {1.0}, false)
                                                                                  : std::vector<double>{0.0}};
  const auto t_axis = std::pair<std::string, std::vector<double>>{"t", c.grid("t", {1.0})};
  auto s_axis = [&] { return std::pair<std::string, std::vector<double>>{"s", c.grid("s", {1.0})}; };

  if (out.action == "convolve") {
    const VectorXd x = c.vector("x", w.n), xp = c.vector("xp", w.n);
    const bool check = c.flag("check_quadrature", false);
    const double rel_tol = c.tol("rel_tol", 1e-10);
    const double accept = c.tol("accept", 1e-6);
    out.rows = sweep(c, {b_axis, t_axis, s_axis()}, [&](const std::vector<double>& p, Row& r) {
      const WeylPair pair = w.at(p[0]);
      const cplx v = convolution_kernel(pair, p[1], p[2], x, xp);
      r.value = v.real();
      r.value_im = v.imag();
      r.error_bound = 1e-13 * std::abs(v);
      r.method = "closed-form";
      r.paper_eq =
          "U(t, s; x, x') = (4 pi)^{-n/2} Omega exp(-<x, A_+ x>/4 - <x', A_- x'>/4 + <x, B x'>/2), "
          "Omega = Omega_+ Omega_- det(D_+ + D_-)^{-1/2}";
      if (check) {
        const NumericConvolution q = numeric_convolution(pair, p[1], p[2], x, xp, rel_tol);
        const double disc = std::abs(q.value - v) / std::max(std::abs(v), 1e-300);
        r.extra = {{"quadrature", q.value.real()},
                   {"quadrature_im", q.value.imag()},
                   {"quadrature_error", q.error},
                   {"order", q.order},
                   {"discrepancy", disc},
                   {"check_passed", disc <= accept}};
      }
    });
  } else if (out.action == "single") {
    const VectorXd x = c.vector("x", w.n), xp = c.vector("xp", w.n);
    out.rows = sweep(c, {b_axis, t_axis}, [&](const std::vector<double>& p, Row& r) {
      const cplx v = single_kernel(w.at(p[0]).plus, p[1], x, xp);
      r.value = v.real();
      r.value_im = v.imag();
      r.error_bound = 1e-13 * std::abs(v);
      r.method = "closed-form";
      r.paper_eq = "U(t; x, x') = (4 pi)^{-n/2} Omega(t) exp(-<u, D(t) u>/4 + (i/2) <x, R x'>)";
    });
  } else if (out.action == "density") {
    const DensityMode mode = density_mode(c.str("mode", "auto"));
    out.rows = sweep(c, {b_axis, t_axis, s_axis()}, [&](const std::vector<double>& p, Row& r) {
      const TraceDensity d = trace_density(w.at(p[0]), p[1], p[2], mode);
      r.value = d.value.real();
      r.value_im = d.value.imag();
      r.error_bound = 1e-13 * std::abs(d.value);
      r.method = d.integrated ? "gaussian-integral" : "per-volume";
      r.paper_eq = "Tr exp(t Delta_+) exp(s Delta_-) = int dx U(t, s; x, x)";
    });
  } else if (out.action == "pair") {
    out.rows = sweep(c, {b_axis, t_axis, s_axis()}, [&](const std::vector<double>& p, Row& r) {
      const PairMatrices pm = pair_matrices(w.at(p[0]), p[1], p[2]);
      r.value = pm.Omega.real();
      r.value_im = pm.Omega.imag();
      r.error_bound = 1e-13 * std::abs(pm.Omega);
      r.method = "closed-form";
      r.paper_eq = "Omega = Omega_+ Omega_- det(D_+ + D_-)^{-1/2}";
      r.extra = {{"min_H", pm.min_H}, {"min_block", pm.min_block}, {"D", matrix_json(pm.D)}};
    });
  } else {
    bad_action(out);
  }
  return out;
}

// ---------------------------------------------------------------- sweep and fit

void require_decade(const std::vector<double>& v, const std::string& name) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (!(*hi >= 10.0 * (1.0 - 1e-9) * *lo)) bad("grid '" + name + "' must span at least a decade");
}

std::vector<TemplateTerm> template_of(const std::vector<double>& powers) {
  std::vector<TemplateTerm> out;
  for (double p : powers) out.push_back({p, 0});
  return out;
}

void emit_series(Output& out, const AsymptoticSeries& series, const std::string& eq,
                 const std::map<double, double>& predicted = {}) {
  for (const auto& t : series.terms()) {
    Row r;
    r.inputs = {{"power", t.power}, {"log_power", t.log_power}};
    r.value = t.coefficient;
    r.error_bound = t.error;
    r.method = "least-squares";
    r.paper_eq = eq;
    if (const auto it = predicted.find(t.power); it != predicted.end() && t.log_power == 0) {
      r.extra = {{"predicted", it->second}, {"difference", t.coefficient - it->second}};
      if (it->second != 0.0) r.extra["discrepancy"] = relative_discrepancy(t.coefficient, it->second);
    }
    out.rows.push_back(r);
  }
  nlohmann::json sj;
  to_json(sj, series);
  out.series = to_ordered(sj);
}

// Squared length on which the small-t expansion of a heat trace is exponentially accurate
// (shortest closed geodesic or interval length; the radius for the sphere).
double fit_time_scale(const ModelOperator& model) {
  if (const auto* iv = std::get_if<Interval>(&model)) return iv->length * iv->length;
  if (const auto* s = std::get_if<Sphere2>(&model)) return s->radius * s->radius;
  if (const auto lat = lattice_form(model)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lat->G, Eigen::EigenvaluesOnly);
    return kPi * kPi / es.eigenvalues().maxCoeff();
  }
  return 1.0;
}

Output cmd_fit(Ctx& c) {
  Output out = start(c, "trace");
  const std::string& target = out.action;
  if (target == "trace") {
    const ModelOperator model = c.model();
    const int n = dimension(model);
    std::vector<double> def_t;
    for (int k = 0; k < 7; ++k) def_t.push_back(3e-4 * std::ldexp(1.0, k) * fit_time_scale(model));
    const auto ts = c.grid("t", def_t);
    require_decade(ts, "t");
    std::vector<double> def;
    for (int k = 0; k <= 3; ++k) def.push_back(0.5 * (k - n));
    const auto powers = c.list("powers", def);
    const double cutoff = c.real("cutoff", heat_cutoff(model, *std::min_element(ts.begin(), ts.end())));
    const HeatTrace trace(model, cutoff);
    const auto rows = parallel_rows(ts.size(), [&](size_t i) { Row r; r.value = trace(ts[i]).value; return r; },
                                    c.threads());
    std::vector<FitSample> samples;
    for (size_t i = 0; i < ts.size(); ++i) samples.push_back({ts[i], rows[i].value});
    std::map<double, double> predicted;
    try {
      const AsymptoticSeries series = predicted_trace_coeffs(geometry_of(model));
      for (const auto& t : series.terms()) predicted[t.power] = t.coefficient;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnsupportedModel) throw;
    }
    emit_series(out, expansion_fit(samples, template_of(powers), "t"), "Theta(t) ~ sum_k c_k t^{p_k}", predicted);
  } else if (target == "heatdet") {
    const ModelOperator model = c.model();
    const int n = dimension(model);
    const auto ts = c.grid("t", {1e-4, 1.5e-4, 2e-4, 3e-4, 5e-4, 7e-4, 1e-3});
    require_decade(ts, "t");
    const auto powers = c.list("powers", {0.0, 0.5, 1.0});
    const double order = heat_det_order(n);
    const auto rows = parallel_rows(
        ts.size(), [&](size_t i) { Row r; r.value = heat_det(model, ts[i]).value * std::pow(ts[i], order); return r; },
        c.threads());
    std::vector<FitSample> samples;
    for (size_t i = 0; i < ts.size(); ++i) samples.push_back({ts[i], rows[i].value});
    emit_series(out, expansion_fit(samples, template_of(powers), "t"), "K(t) t^{n(n+1/2)} ~ sum_k c_k t^{p_k}",
                {{0.0, heat_det_leading(n, 1, volume(model))}});
  } else if (target == "theorem1" || target == "theorem1-y") {
    const TracePair pair = c.pair();
    const double t = single(c, "t"), s = single(c, "s");
    const auto eps = c.grid("eps", default_eps());
    require_decade(eps, "eps");
    const CombinedTrace which = target == "theorem1" ? CombinedTrace::X : CombinedTrace::Y;
    const Theorem1Fit fit = theorem1_leading_fit(pair, t, s, eps, which);
    emit_series(out, fit.series, "(4 pi eps)^{n/2} X(eps t, eps s) ~ B_0 + B_1 eps + B_2 eps^2",
                {{0.0, fit.predicted}});
    for (auto& r : out.rows) {
      r.inputs["t"] = t;
      r.inputs["s"] = s;
    }
  } else if (target == "weyl-density") {
    const WeylSpec w = weyl_spec(c);
    const bool needs_b = !(w.r_plus_fixed && w.r_minus_fixed);
    const auto bs = needs_b ? c.grid("b", {1.0}, false) : std::vector<double>{0.0};
    if (bs.size() != 1) bad("weyl-density fits take a single b");
    const WeylPair pair = w.at(bs.front());
    const double t = single(c, "t"), s = single(c, "s");
    const auto eps = c.grid("eps", default_eps());
    require_decade(eps, "eps");
    const auto rows = parallel_rows(
        eps.size(),
        [&](size_t i) {
          Row r;
          r.value = trace_density(pair, eps[i] * t, eps[i] * s, DensityMode::PerVolume).value.real() *
                    std::pow(4.0 * kPi * eps[i], 0.5 * w.n);
          return r;
        },
        c.threads());
    std::vector<FitSample> samples;
    for (size_t i = 0; i < eps.size(); ++i) samples.push_back({eps[i], rows[i].value});
    const MatrixXd ginv = t * w.g_plus.inverse() + s * w.g_minus.inverse();
    const double predicted = 1.0 / std::sqrt(ginv.determinant());
    emit_series(out, expansion_fit(samples, template_of({0.0, 1.0, 2.0}), "eps"),
                "(4 pi eps)^{n/2} U(eps t, eps s; x, x) ~ b_0 + b_1 eps + b_2 eps^2, b_0 = g^{1/2}(t, s)",
                {{0.0, predicted}});
  } else {
    bad("fit target must be trace, heatdet, theorem1, theorem1-y or weyl-density");
  }
  return out;
}

}  // namespace

int thread_count() {
  const char* env = std::getenv("SPECLAB_THREADS");
  if (env == nullptr || *env == '\0') return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int v = 0;
  const std::string s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1 || v > 1024) {
    bad("SPECLAB_THREADS must be an integer in [1, 1024]");
  }
  return v;
}

std::vector<Row> parallel_rows(std::size_t count, const std::function<Row(std::size_t)>& f, int threads) {
  std::vector<Row> rows(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        rows[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < std::min(workers, count); ++k) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

Output run(const JobSpec& job, int threads) {
  validate(job);
  static const std::map<std::string, Output (*)(Ctx&)> table{
      {"spectrum", cmd_spectrum},     {"trace", cmd_trace},       {"rtrace", cmd_rtrace},
      {"qtrace", cmd_qtrace},         {"aq", cmd_aq},             {"zeta", cmd_zeta},
      {"logdet", cmd_logdet},         {"coeffs", cmd_coeffs},     {"ggs-gamma", cmd_ggs_gamma},
      {"nonlaplace", cmd_nonlaplace}, {"magnetic", cmd_magnetic}, {"relative", cmd_relative},
      {"bogolyubov", cmd_bogolyubov}, {"heatdet", cmd_heatdet},   {"weyl", cmd_weyl},
      {"fit", cmd_fit}};
  Ctx ctx(job, threads);
  Output out = table.at(job.command)(ctx);
  ctx.check_unused();
  return out;
}

}  // namespace speclab::cli
