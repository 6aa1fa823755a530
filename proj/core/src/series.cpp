#include "speclab/series.hpp"

#include <algorithm>
#include <cmath>

#include "speclab/errors.hpp"

namespace speclab {

namespace {
constexpr double kPowerTol = 1e-12;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Fitted: return "Fitted";
    case Provenance::ClosedForm: return "ClosedForm";
    case Provenance::Residue: return "Residue";
  }
  return "ClosedForm";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "Fitted") return Provenance::Fitted;
  if (s == "ClosedForm") return Provenance::ClosedForm;
  if (s == "Residue") return Provenance::Residue;
  fail(ErrorCode::InvalidArgument, "unknown provenance '" + s + "'");
}

void AsymptoticSeries::add(const SeriesTerm& term) {
  require(std::isfinite(term.power), ErrorCode::InvalidArgument, "series power must be finite");
  require(term.log_power == 0 || term.log_power == 1, ErrorCode::InvalidArgument, "log power must be 0 or 1");
  require(find(term.power, term.log_power) == nullptr, ErrorCode::InvalidArgument,
          "duplicate series term at power " + std::to_string(term.power));
  const auto pos = std::upper_bound(terms_.begin(), terms_.end(), term, [](const auto& a, const auto& b) {
    return a.power < b.power || (a.power == b.power && a.log_power < b.log_power);
  });
  terms_.insert(pos, term);
}

const SeriesTerm* AsymptoticSeries::find(double power, int log_power) const {
  for (const auto& t : terms_) {
    if (std::abs(t.power - power) <= kPowerTol && t.log_power == log_power) return &t;
  }
  return nullptr;
}

double AsymptoticSeries::coefficient(double power, int log_power) const {
  const auto* t = find(power, log_power);
  return t ? t->coefficient : 0.0;
}

double AsymptoticSeries::evaluate(double eps) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coefficient * std::pow(eps, t.power);
    if (t.log_power == 1) v *= std::log(eps);
    sum += v;
  }
  return sum;
}

void to_json(nlohmann::json& j, const AsymptoticSeries& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : s.terms()) {
    terms.push_back({{"power", t.power},
                     {"log_power", t.log_power},
                     {"coefficient", t.coefficient},
                     {"error", t.error},
                     {"provenance", to_string(t.provenance)}});
  }
  j = nlohmann::json{{"variable", s.variable()}, {"terms", terms}};
  if (s.diagnostics) {
    j["diagnostics"] = {{"residual_norm", s.diagnostics->residual_norm},
                        {"condition_number", s.diagnostics->condition_number},
                        {"samples", s.diagnostics->samples},
                        {"spans_decade", s.diagnostics->spans_decade}};
  }
}

void from_json(const nlohmann::json& j, AsymptoticSeries& s) {
  s = AsymptoticSeries(j.at("variable").get<std::string>());
  for (const auto& t : j.at("terms")) {
    s.add(SeriesTerm{t.at("power").get<double>(), t.at("log_power").get<int>(), t.at("coefficient").get<double>(),
                     t.value("error", 0.0), provenance_from_string(t.at("provenance").get<std::string>())});
  }
  if (j.contains("diagnostics")) {
    const auto& d = j.at("diagnostics");
    s.diagnostics = FitDiagnostics{d.at("residual_norm").get<double>(), d.at("condition_number").get<double>(),
                                   d.at("samples").get<int>(), d.value("spans_decade", true)};
  }
}

}  // namespace speclab
