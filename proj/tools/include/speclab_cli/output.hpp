#pragma once

// Result rows and their JSON / CSV rendering.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace speclab::cli {

using Json = nlohmann::ordered_json;

struct Row {
  Json inputs = Json::object();
  double value = 0.0;
  std::optional<double> value_im;  // set for complex results
  double error_bound = 0.0;
  std::string method;
  std::string paper_eq;  // formula the value evaluates
  Json extra;            // optional command-specific fields
};

struct Output {
  std::string command;
  std::string action;
  std::vector<Row> rows;
  Json series;  // fitted series for sweep commands, null otherwise
};

Json row_json(const Row& row);
/// Document {"schema", "command", "action", "rows", "series"?} with 17 significant digits.
std::string render_json(const Output& out);
/// One header line of flattened JSON keys ("inputs.t", "extra.kernel", ...) and one line per row.
std::string render_csv(const Output& out);
/// Compact JSON with every float printed to 17 significant digits.
std::string dump17(const Json& j, int indent = -1);

}  // namespace speclab::cli
