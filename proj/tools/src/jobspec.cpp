#include "speclab_cli/jobspec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "speclab/errors.hpp"

namespace speclab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void bad(const std::string& msg) { fail(ErrorCode::InvalidArgument, msg); }

bool valid_key(const std::string& k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

void check_value(const std::string& v, const std::string& key) {
  if (v.find('\n') != std::string::npos || v.find('#') != std::string::npos || trim(v) != v) {
    bad("value of '" + key + "' cannot be written to a job file");
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"spectrum", "trace",      "rtrace",    "qtrace",     "aq",     "zeta",
                                              "logdet",   "coeffs",     "ggs-gamma", "nonlaplace", "magnetic",
                                              "relative", "bogolyubov", "heatdet",   "weyl",       "fit"};
  return names;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    bad("'" + s + "' is not a finite real number (" + what + ")");
  }
  return v;
}

std::vector<double> parse_real_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item, what));
  if (out.empty()) bad("empty list for " + what);
  return out;
}

std::string serialize(const JobSpec& job) {
  std::ostringstream out;
  const auto kv = [&](const std::string& k, const std::string& v) {
    check_value(v, k);
    out << k << " = " << v << "\n";
  };
  out << "[job]\n";
  kv("command", job.command);
  if (!job.action.empty()) kv("action", job.action);
  kv("format", job.format);
  kv("output", job.output);
  for (const auto& [name, values] : job.models) {
    out << "\n[" << (name.empty() ? std::string("model") : "model." + name) << "]\n";
    for (const auto& [k, v] : values) kv(k, v);
  }
  if (!job.grid.empty()) {
    out << "\n[grid]\n";
    for (const auto& [k, list] : job.grid) {
      std::string joined;
      for (size_t i = 0; i < list.size(); ++i) joined += (i ? ", " : "") + format_real(list[i]);
      kv(k, joined);
    }
  }
  if (!job.tolerances.empty()) {
    out << "\n[tolerances]\n";
    for (const auto& [k, v] : job.tolerances) kv(k, format_real(v));
  }
  if (!job.params.empty()) {
    out << "\n[params]\n";
    for (const auto& [k, v] : job.params) kv(k, v);
  }
  return out.str();
}

JobSpec parse_job(const std::string& text) {
  JobSpec job;
  job.format.clear();
  job.output.clear();
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  bool seen_job = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section == "job") {
        seen_job = true;
      } else if (section == "model") {
        job.models[""];
      } else if (section.rfind("model.", 0) == 0 && valid_key(section.substr(6))) {
        job.models[section.substr(6)];
      } else if (section != "grid" && section != "tolerances" && section != "params") {
        bad(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) bad(where + ": invalid key '" + key + "'");
    if (section.empty()) bad(where + ": key outside of a section");
    auto put = [&](KeyValues& map) {
      if (!map.emplace(key, value).second) bad(where + ": duplicate key '" + key + "'");
    };
    if (section == "job") {
      if (key == "command") {
        job.command = value;
      } else if (key == "action") {
        job.action = value;
      } else if (key == "format") {
        job.format = value;
      } else if (key == "output") {
        job.output = value;
      } else {
        bad(where + ": unknown [job] key '" + key + "'");
      }
    } else if (section == "model") {
      put(job.models[""]);
    } else if (section.rfind("model.", 0) == 0) {
      put(job.models[section.substr(6)]);
    } else if (section == "grid") {
      if (!job.grid.emplace(key, parse_real_list(value, key)).second) bad(where + ": duplicate key '" + key + "'");
    } else if (section == "tolerances") {
      if (!job.tolerances.emplace(key, parse_real(value, key)).second) bad(where + ": duplicate key '" + key + "'");
    } else {
      put(job.params);
    }
  }
  if (!seen_job) bad("job file has no [job] section");
  if (job.format.empty()) job.format = "json";
  if (job.output.empty()) job.output = "-";
  return job;
}

void validate(const JobSpec& job) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), job.command) == names.end()) bad("unknown command '" + job.command + "'");
  if (job.format != "json" && job.format != "csv") bad("format must be json or csv");
  for (const auto& [k, list] : job.grid) {
    if (list.empty()) bad("grid '" + k + "' is empty");
  }
  for (const auto& [k, v] : job.tolerances) {
    if (!(v >= 1e-14)) bad("tolerance '" + k + "' must be at least 1e-14");
  }
}

}  // namespace speclab::cli
