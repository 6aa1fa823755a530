#pragma once

// Finite asymptotic expansions sum_k c_k eps^{p_k} (log eps)^{l_k}.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace speclab {

enum class Provenance { Fitted, ClosedForm, Residue };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct SeriesTerm {
  double power = 0.0;
  int log_power = 0;
  double coefficient = 0.0;
  double error = 0.0;
  Provenance provenance = Provenance::ClosedForm;
  bool operator==(const SeriesTerm&) const = default;
};

struct FitDiagnostics {
  double residual_norm = 0.0;
  double condition_number = 0.0;
  int samples = 0;
  bool spans_decade = true;
  bool operator==(const FitDiagnostics&) const = default;
};

class AsymptoticSeries {
 public:
  explicit AsymptoticSeries(std::string variable = "t") : variable_(std::move(variable)) {}

  /// Inserts keeping (power, log_power) ordering; duplicates are rejected.
  void add(const SeriesTerm& term);
  const std::vector<SeriesTerm>& terms() const { return terms_; }
  const std::string& variable() const { return variable_; }
  const SeriesTerm* find(double power, int log_power = 0) const;
  /// Coefficient of a term, zero if absent.
  double coefficient(double power, int log_power = 0) const;
  double evaluate(double eps) const;

  std::optional<FitDiagnostics> diagnostics;

  bool operator==(const AsymptoticSeries&) const = default;

 private:
  std::string variable_;
  std::vector<SeriesTerm> terms_;
};

void to_json(nlohmann::json& j, const AsymptoticSeries& s);
void from_json(const nlohmann::json& j, AsymptoticSeries& s);

}  // namespace speclab
