#include "speclab_cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "speclab_cli/jobspec.hpp"

namespace speclab::cli {

namespace {

void dump_to(std::ostringstream& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out << '\n' << std::string(static_cast<size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ',';
        first = false;
        newline(depth + 1);
        out << Json(it.key()).dump() << (indent < 0 ? ":" : ": ");
        dump_to(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << '[';
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out << ',';
        newline(depth + 1);
        dump_to(out, j[i], indent, depth + 1);
      }
      newline(depth);
      out << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out << (std::isfinite(v) ? format_real(v) : "null");
      return;
    }
    default:
      out << j.dump();
  }
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, Json>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (!j.is_null()) {
    out.emplace_back(prefix, j);
  }
}

std::string csv_cell(const Json& v) {
  std::string s;
  if (v.is_string()) {
    s = v.get<std::string>();
  } else if (v.is_number_float()) {
    s = std::isfinite(v.get<double>()) ? format_real(v.get<double>()) : "";
  } else {
    s = dump17(v);
  }
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

}  // namespace

std::string dump17(const Json& j, int indent) {
  std::ostringstream out;
  dump_to(out, j, indent, 0);
  return out.str();
}

Json row_json(const Row& row) {
  Json j = Json::object();
  j["inputs"] = row.inputs;
  j["value"] = row.value;
  if (row.value_im) j["value_im"] = *row.value_im;
  j["error_bound"] = row.error_bound;
  j["method"] = row.method;
  j["paper_eq"] = row.paper_eq;
  if (!row.extra.is_null()) j["extra"] = row.extra;
  return j;
}

std::string render_json(const Output& out) {
  Json doc = Json::object();
  doc["schema"] = "speclab-result/1";
  doc["command"] = out.command;
  doc["action"] = out.action;
  Json rows = Json::array();
  for (const auto& r : out.rows) rows.push_back(row_json(r));
  doc["rows"] = rows;
  if (!out.series.is_null()) doc["series"] = out.series;
  return dump17(doc, 2) + "\n";
}

std::string render_csv(const Output& out) {
  std::vector<std::string> columns;
  std::vector<std::vector<std::pair<std::string, Json>>> flat;
  for (const auto& r : out.rows) {
    flat.emplace_back();
    flatten(row_json(r), "", flat.back());
    for (const auto& [k, v] : flat.back()) {
      if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
    }
  }
  std::ostringstream s;
  for (size_t i = 0; i < columns.size(); ++i) s << (i ? "," : "") << columns[i];
  s << "\n";
  for (const auto& row : flat) {
    for (size_t i = 0; i < columns.size(); ++i) {
      if (i) s << ",";
      const auto it = std::find_if(row.begin(), row.end(), [&](const auto& kv) { return kv.first == columns[i]; });
      if (it != row.end()) s << csv_cell(it->second);
    }
    s << "\n";
  }
  return s.str();
}

}  // namespace speclab::cli
