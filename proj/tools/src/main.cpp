#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "speclab/errors.hpp"
#include "speclab_cli/args.hpp"
#include "speclab_cli/commands.hpp"
#include "speclab_cli/jobspec.hpp"
#include "speclab_cli/output.hpp"

namespace {

using namespace speclab;
using namespace speclab::cli;

constexpr int kValidation = 2;
constexpr int kNumerical = 3;

int report(int code, const std::string& error, const std::string& message, const std::string& command) {
  Json j = Json::object();
  j["error"] = error;
  j["message"] = message;
  j["command"] = command;
  std::cerr << dump17(j) << "\n";
  return code;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot read job file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speclab: heat traces, heat invariants and spectral functions of exactly solvable operators"};
  app.require_subcommand(0, 1);

  std::string job_file, format, output;
  bool dump_job = false;
  auto common = [&](CLI::App* a) {
    a->add_option("--job", job_file, "Job file with [job], [model], [grid], [tolerances] and [params] sections");
    a->add_option("--format", format, "json or csv");
    a->add_option("--output", output, "Output path, '-' for stdout");
    a->add_flag("--dump-job", dump_job, "Print the job file equivalent to this invocation and exit");
  };
  common(&app);
  const std::map<std::string, std::string> about{
      {"spectrum", "Eigenvalues below --cutoff"},
      {"trace", "Heat trace over --t"},
      {"rtrace", "Relativistic trace over --beta (--path direct|integral|both)"},
      {"qtrace", "Bose/Fermi occupation trace over --beta, --mu"},
      {"aq", "Mellin transform A_q over --q"},
      {"zeta", "Spectral zeta function over --s"},
      {"logdet", "Zeta-regularized log determinant"},
      {"coeffs", "Heat coefficients: standard | geometric"},
      {"ggs-gamma", "Oblique boundary gamma on random commuting or Clifford instances"},
      {"nonlaplace", "Constant-symbol densities: a0 | a2 | psi | dirichlet-a1"},
      {"magnetic", "Constant-field kernels: landau | u0 | h | b2"},
      {"relative", "Combined traces of an operator pair: x | y | psi | phi | theorem1"},
      {"bogolyubov", "Bogolyubov invariant: value | exponent"},
      {"heatdet", "Heat determinant: spectral | defining | leading | correlators"},
      {"weyl", "Weyl-algebra semigroups: convolve | single | density | pair"},
      {"fit", "Sweep and fit: trace | heatdet | theorem1 | theorem1-y | weyl-density"}};
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->allow_extras();
    common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  std::string command;
  try {
    JobSpec job;
    if (!job_file.empty()) job = parse_job(read_file(job_file));
    const auto subs = app.get_subcommands();
    if (!subs.empty()) {
      if (!job_file.empty() && job.command != subs.front()->get_name()) {
        fail(ErrorCode::InvalidArgument, "job file command '" + job.command + "' differs from the subcommand");
      }
      job.command = subs.front()->get_name();
      apply_args(job, subs.front()->remaining());
    } else if (job_file.empty()) {
      std::cout << app.help();
      return kValidation;
    }
    command = job.command;
    if (!format.empty()) job.format = format;
    if (!output.empty()) job.output = output;
    validate(job);
    if (dump_job) {
      std::cout << serialize(job);
      return 0;
    }
    const Output out = run(job, thread_count());
    const std::string text = job.format == "csv" ? render_csv(out) : render_json(out);
    if (job.output == "-") {
      std::cout << text;
    } else {
      std::ofstream file(job.output);
      if (!file || !(file << text)) fail(ErrorCode::InvalidArgument, "cannot write '" + job.output + "'");
    }
    return 0;
  } catch (const Error& e) {
    return report(is_validation_error(e.code()) ? kValidation : kNumerical, std::string(to_string(e.code())), e.what(),
                  command);
  } catch (const std::exception& e) {
    return report(kNumerical, "InternalError", e.what(), command);
  }
}
