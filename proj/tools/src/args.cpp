#include "speclab_cli/args.hpp"

#include <algorithm>
#include <array>
#include <string_view>

#include "speclab/errors.hpp"

namespace speclab::cli {

namespace {

constexpr std::array<std::string_view, 13> kModelKeys{"model",  "radius", "twist",  "mass2",   "metric",
                                                      "dim",    "length", "left",   "right",   "left_s",
                                                      "right_s", "field", "frame"};
constexpr std::array<std::string_view, 7> kGridKeys{"t", "s", "beta", "mu", "q", "eps", "b"};
constexpr std::array<std::string_view, 2> kToleranceKeys{"rel_tol", "accept"};

template <size_t K>
bool contains(const std::array<std::string_view, K>& set, const std::string& key) {
  return std::find(set.begin(), set.end(), key) != set.end();
}

void put_model(JobSpec& job, const std::string& name, const std::string& key, const std::string& value) {
  job.models[name][key == "model" ? "kind" : key] = value;
}

}  // namespace

void apply_args(JobSpec& job, const std::vector<std::string>& args) {
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) {
      if (i == 0) {
        job.action = a;
        continue;
      }
      fail(ErrorCode::InvalidArgument, "unexpected argument '" + a + "'");
    }
    std::string key = a.substr(2);
    std::string value = "true";
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else if (i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0) {
      value = args[++i];
    }
    std::replace(key.begin(), key.end(), '-', '_');
    if (key.empty()) fail(ErrorCode::InvalidArgument, "empty option name");

    if (contains(kModelKeys, key)) {
      put_model(job, "", key, value);
    } else if ((key.rfind("plus_", 0) == 0 && contains(kModelKeys, key.substr(5))) ||
               (key.rfind("minus_", 0) == 0 && contains(kModelKeys, key.substr(6)))) {
      const auto cut = key.find('_');
      put_model(job, key.substr(0, cut), key.substr(cut + 1), value);
    } else if (contains(kGridKeys, key)) {
      job.grid[key] = parse_real_list(value, key);
    } else if (contains(kToleranceKeys, key)) {
      job.tolerances[key] = parse_real(value, key);
    } else {
      job.params[key] = value;
    }
  }
}

}  // namespace speclab::cli
