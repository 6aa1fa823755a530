#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>

#include "check.hpp"
#include "speclab_cli/args.hpp"
#include "speclab_cli/commands.hpp"
#include "speclab_cli/jobspec.hpp"
#include "speclab_cli/output.hpp"

using namespace speclab;
using namespace speclab::cli;

namespace {

JobSpec job_from(const std::string& command, const std::vector<std::string>& args) {
  JobSpec job;
  job.command = command;
  apply_args(job, args);
  validate(job);
  return job;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("17 significant digits round-trip every double") {
    for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.2250738585072014e-308, 1.7726372048266521}) {
      CHECK(parse_real(format_real(x), "x") == x);
    }
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(check::code_of([] { parse_real("1.0x", "x"); }) == ErrorCode::InvalidArgument);
    CHECK(check::code_of([] { parse_real("nan", "x"); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("job files round-trip") {
    JobSpec job;
    job.command = "relative";
    job.action = "theorem1";
    job.models["plus"] = {{"kind", "circle"}, {"radius", "1"}};
    job.models["minus"] = {{"kind", "circle"}, {"radius", "1.5"}};
    job.grid["eps"] = {1e-3, 0.1, 1.0 / 3.0};
    job.tolerances["rel_tol"] = 1e-10;
    job.params["which"] = "x";
    job.format = "csv";
    const std::string text = serialize(job);
    CHECK(parse_job(text) == job);
    CHECK(serialize(parse_job(text)) == text);
  }

  TEST_CASE("malformed job files") {
    CHECK(check::code_of([] { parse_job("[grid]\nt = 1\n"); }) == ErrorCode::InvalidArgument);
    CHECK(check::code_of([] { parse_job("[job]\ncommand = trace\n[weird]\n"); }) == ErrorCode::InvalidArgument);
    CHECK(check::code_of([] { parse_job("[job]\ncommand = trace\n[params]\na = 1\na = 2\n"); }) ==
          ErrorCode::InvalidArgument);
    CHECK(check::code_of([] { parse_job("[job]\ncommand = trace\n[grid]\nt = 1, x\n"); }) ==
          ErrorCode::InvalidArgument);
    CHECK(check::code_of([] { parse_job("[job]\ncommand = trace\nnoequals\n"); }) == ErrorCode::InvalidArgument);
    JobSpec bad;
    bad.command = "nope";
    CHECK(check::code_of([&] { validate(bad); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("argument mapping") {
    JobSpec job;
    job.command = "relative";
    apply_args(job, {"theorem1", "--plus-model", "dirac", "--minus-frame=1.4", "--eps", "0.1,0.2", "--rel-tol",
                     "1e-9", "--which", "y", "--check-quadrature", "--mass2", "2"});
    CHECK(job.action == "theorem1");
    CHECK(job.models["plus"].at("kind") == "dirac");
    CHECK(job.models["minus"].at("frame") == "1.4");
    CHECK(job.models[""].at("mass2") == "2");
    CHECK(job.grid.at("eps") == std::vector<double>{0.1, 0.2});
    CHECK(job.tolerances.at("rel_tol") == 1e-9);
    CHECK(job.params.at("which") == "y");
    CHECK(job.params.at("check_quadrature") == "true");
  }

  TEST_CASE("trace of the unit circle") {
    const Output out = run(job_from("trace", {"--model", "circle", "--t", "1.0"}), 1);
    REQUIRE(out.rows.size() == 1);
    CHECK(format_real(out.rows[0].value) == "1.7726372048266521");
    CHECK(out.rows[0].method == "theta");
    const Json j = Json::parse(render_json(out));
    CHECK(j.at("schema") == "speclab-result/1");
    for (const char* key : {"inputs", "value", "error_bound", "method", "paper_eq"}) {
      CHECK(j.at("rows")[0].contains(key));
    }
  }

  TEST_CASE("CSV columns mirror JSON keys") {
    const Output out = run(job_from("trace", {"--model", "circle", "--t", "0.5,1"}), 1);
    const std::string csv = render_csv(out);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header.find("inputs.t") != std::string::npos);
    for (const char* key : {"value", "error_bound", "method", "paper_eq"}) {
      CHECK(header.find(key) != std::string::npos);
    }
    int lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    CHECK(lines == 2);
  }

  TEST_CASE("results do not depend on the thread count") {
    const JobSpec job = job_from("bogolyubov", {"--plus-model", "circle", "--minus-model", "circle",
                                                "--minus-radius", "1.3", "--mass", "0.8", "--beta", "0.5,1,2",
                                                "--method", "spectral"});
    CHECK(render_json(run(job, 1)) == render_json(run(job, 4)));
    const JobSpec sweep = job_from("zeta", {"--model", "circle", "--mass2", "1", "--s", "0.75,1,1.5,2,3"});
    CHECK(render_json(run(sweep, 1)) == render_json(run(sweep, 3)));
  }

  TEST_CASE("parallel rows keep index order and report the lowest failure") {
    const auto rows = parallel_rows(
        50, [](std::size_t i) { return Row{.value = static_cast<double>(i)}; }, 4);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].value == static_cast<double>(i));
    try {
      parallel_rows(
          20,
          [](std::size_t i) -> Row {
            if (i == 7) fail(ErrorCode::TailTooLarge, "seven");
            if (i == 13) fail(ErrorCode::InvalidArgument, "thirteen");
            return {};
          },
          4);
      FAIL("no exception");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TailTooLarge);
    }
  }

  TEST_CASE("unused keys are validation errors") {
    const JobSpec job = job_from("trace", {"--model", "circle", "--t", "1", "--bogus", "3"});
    CHECK(check::code_of([&] { run(job, 1); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("Bose condensation exits through a validation error") {
    const JobSpec job = job_from("qtrace", {"--statistics", "bose", "--mu", "5", "--model", "circle", "--mass2", "1"});
    const auto code = check::code_of([&] { run(job, 1); });
    CHECK(code == ErrorCode::BoseDivergence);
    CHECK(is_validation_error(code));
  }

  TEST_CASE("trace fit recovers the Dirichlet boundary term") {
    const Output out = run(job_from("fit", {"trace", "--model", "interval", "--length", "1"}), 1);
    bool found = false;
    for (const auto& r : out.rows) {
      if (r.inputs.value("power", 99.0) == 0.0) {
        CHECK(r.value == doctest::Approx(-0.5).epsilon(1e-9));
        found = true;
      }
    }
    CHECK(found);
    CHECK_FALSE(out.series.is_null());
  }

  TEST_CASE("quadrature-checked Weyl convolution") {
    const Output out =
        run(job_from("weyl", {"convolve", "--n", "2", "--b", "1", "--t", "0.5", "--s", "0.5", "--check-quadrature"}), 1);
    REQUIRE(out.rows.size() == 1);
    CHECK(out.rows[0].extra.at("check_passed") == true);
    CHECK(out.rows[0].extra.at("discrepancy").get<double>() < 1e-10);
  }

  TEST_CASE("dump17 writes 17 digits and nulls for non-finite values") {
    Json j = {{"a", 0.1}, {"b", std::nan("")}, {"c", 3}};
    CHECK(dump17(j) == R"({"a":0.10000000000000001,"b":null,"c":3})");
  }
}
