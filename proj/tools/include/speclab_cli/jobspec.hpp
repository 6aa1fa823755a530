#pragma once

// Job description shared by command-line flags and job files.
//
// Job files are flat key = value text with typed sections:
//   [job]         command, action, format, output   (strings)
//   [model]       single model descriptor           (strings)
//   [model.NAME]  named models, e.g. plus / minus   (strings)
//   [grid]        sweep lists                       (comma separated reals)
//   [tolerances]  scalar tolerances                 (reals >= 1e-14)
//   [params]      everything else                   (strings)
// Lines starting with '#' are comments. Reals are written with 17 significant
// digits, so serialize/parse round-trips exactly.

#include <map>
#include <string>
#include <vector>

namespace speclab::cli {

using KeyValues = std::map<std::string, std::string>;

struct JobSpec {
  std::string command;
  std::string action;
  std::map<std::string, KeyValues> models;  // "" is the unnamed [model] section
  std::map<std::string, std::vector<double>> grid;
  std::map<std::string, double> tolerances;
  KeyValues params;
  std::string format = "json";
  std::string output = "-";

  bool operator==(const JobSpec&) const = default;
};

std::string serialize(const JobSpec& job);
/// Throws speclab::Error(InvalidArgument) on malformed input.
JobSpec parse_job(const std::string& text);

/// Structural checks: known command, format, non-empty grids, tolerances >= 1e-14.
void validate(const JobSpec& job);

std::string format_real(double x);
double parse_real(const std::string& s, const std::string& what);
std::vector<double> parse_real_list(const std::string& s, const std::string& what);

const std::vector<std::string>& command_names();

}  // namespace speclab::cli
