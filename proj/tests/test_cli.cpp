// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "polygauge/cli.hpp"
#include "polygauge/errors.hpp"

using namespace polygauge;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

const char* kPeakInstance = R"({
  "schema": 1,
  "phi": [[1.0, 0.0], [0.0, 1.0]],
  "h": {"kind": "linf", "n": 2},
  "x0": [2.0, 1.0],
  "lambda": 0.05
})";

const char* kSoftThresholdInstance = R"({
  "schema": 1,
  "phi": [[1.0, 0.0], [0.0, 1.0]],
  "h": {"kind": "l1", "n": 2},
  "x0": [3.0, 0.0],
  "lambda": 0.2
})";

std::string write_temp(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "polygauge_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(POLYGAUGE_CLI_PATH) + " " + args +
                          " > /dev/null 2> /dev/null";
  const int raw = std::system(cmd.c_str());
  return WEXITSTATUS(raw);
}

} // namespace

TEST_CASE("certification report for the peak instance") {
  const auto instances = parse_instances(kPeakInstance);
  const cli::RunResult r =
      cli::certify_instances(instances, cli::CertifyOptions{}, "deadbeef");
  CHECK(r.exit_code == cli::kExitOk);

  const json doc = json::parse(r.report_json);
  CHECK(doc.at("mode") == "certify");
  CHECK(doc.at("config_hash") == "deadbeef");
  REQUIRE(doc.at("records").size() == 1);
  const json& rec = doc.at("records").front();
  CHECK(rec.at("status") == "ok");
  CHECK(rec.at("ic").get<double>() == doctest::Approx(1.0));
  CHECK(rec.at("verdict") == "certified-positive");
  CHECK(rec.at("support") == json::array({1}));
  CHECK(rec.at("constants").at("t").get<double>() == doctest::Approx(1.0));
  CHECK_FALSE(rec.at("lambda_interval").at("empty").get<bool>());
  CHECK(rec.at("lambda_interval").at("hi").get<double>() ==
        doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rec.at("noiseless_certificate").at("min_v").get<double>() > 0);
  CHECK_FALSE(rec.contains("timings_ms"));
}

TEST_CASE("certification records precondition failures and continues") {
  // First instance: restricted injectivity fails (the face subspace is
  // invisible to the measurement). Second: the projected face vector
  // vanishes. Third: fine.
  const char* batch = R"({
    "schema": 1,
    "instances": [
      {"phi": [[0.0, 1.0]], "h": {"kind": "linf", "n": 2}, "x0": [0.0, 2.0]},
      {"phi": [[1.0, 0.0]], "h": {"kind": "linf", "n": 2}, "x0": [0.0, 2.0]},
      {"phi": [[1.0, 0.0], [0.0, 1.0]], "h": {"kind": "linf", "n": 2},
       "x0": [2.0, 1.0]}
    ]
  })";
  const cli::RunResult r = cli::certify_instances(
      parse_instances(batch), cli::CertifyOptions{}, "h");
  CHECK(r.exit_code == cli::kExitPreconditionFailure);
  const json doc = json::parse(r.report_json);
  REQUIRE(doc.at("records").size() == 3);
  CHECK(doc.at("records")[0].at("status") == "precondition-failure");
  CHECK(doc.at("records")[0].at("restricted_injectivity") == false);
  CHECK(doc.at("records")[1].at("status") == "precondition-failure");
  CHECK(doc.at("records")[1].at("restricted_injectivity") == true);
  CHECK(doc.at("records")[2].at("status") == "ok");
}

TEST_CASE("certification flags invalid gauges") {
  const char* bad = R"({
    "schema": 1,
    "phi": [[1.0, 0.0]],
    "h": {"kind": "explicit", "columns": [[1.0, 0.0], [-1.0, 0.0]]},
    "x0": [1.0, 0.0]
  })";
  const cli::RunResult r =
      cli::certify_instances(parse_instances(bad), cli::CertifyOptions{}, "h");
  CHECK(r.exit_code == cli::kExitPreconditionFailure);
  const json doc = json::parse(r.report_json);
  CHECK(doc.at("records")[0].at("gauge_valid") == false);
  CHECK(doc.at("records")[0].contains("witness"));
}

TEST_CASE("solver methods agree on the soft-threshold instance") {
  const auto instances = parse_instances(kSoftThresholdInstance);

  cli::SolveOptions closed;
  closed.method = "closed-form";
  const json cf = json::parse(
      cli::solve_instances(instances, closed, "h").report_json);
  REQUIRE(cf.at("records")[0].at("status") == "ok");

  cli::SolveOptions qp;
  qp.method = "qp";
  const json or_ = json::parse(
      cli::solve_instances(instances, qp, "h").report_json);
  REQUIRE(or_.at("records")[0].at("status") == "ok");

  const auto& xa = cf.at("records")[0].at("x");
  const auto& xb = or_.at("records")[0].at("x");
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(xa[i].get<double>() ==
          doctest::Approx(xb[i].get<double>()).epsilon(1e-6));
  CHECK(cf.at("records")[0].at("verdict") == "certified-positive");
  CHECK(cf.at("records")[0].at("lambda_in_range") == true);

  // Noiseless equality-constrained recovery returns x0.
  cli::SolveOptions lp0;
  lp0.method = "lp0";
  const json p0 = json::parse(
      cli::solve_instances(instances, lp0, "h").report_json);
  REQUIRE(p0.at("records")[0].at("status") == "ok");
  CHECK(p0.at("records")[0].at("l2_error").get<double>() <= 1e-8);
}

TEST_CASE("closed form surfaces an out-of-range weight as inconclusive") {
  const char* wide = R"({
    "schema": 1,
    "phi": [[1.0, 0.0], [0.0, 1.0]],
    "h": {"kind": "linf", "n": 2},
    "x0": [2.0, 1.0],
    "lambda": 1.5
  })";
  cli::SolveOptions closed;
  closed.method = "closed-form";
  const json doc = json::parse(
      cli::solve_instances(parse_instances(wide), closed, "h").report_json);
  const json& rec = doc.at("records")[0];
  CHECK(rec.at("verdict") == "inconclusive");
  CHECK(rec.at("violated") == "outside_strict_inequalities");
  CHECK(rec.at("lambda_in_range") == false);
}

TEST_CASE("certification reports are byte-identical across runs") {
  const auto instances = parse_instances(kPeakInstance);
  const cli::RunResult a =
      cli::certify_instances(instances, cli::CertifyOptions{}, "aa");
  const cli::RunResult b =
      cli::certify_instances(instances, cli::CertifyOptions{}, "aa");
  CHECK(a.report_json == b.report_json);

  cli::CertifyOptions timed;
  timed.timings = true;
  const cli::RunResult c = cli::certify_instances(instances, timed, "aa");
  CHECK(json::parse(c.report_json).at("records")[0].contains("timings_ms"));
}

TEST_CASE("experiment outputs are byte-identical across runs") {
  const char* config = R"({
    "gauge": {"kind": "linf", "n": 4},
    "q": 5,
    "sigma": 0.02,
    "instances": 3
  })";
  const cli::ExperimentFiles a =
      cli::experiment_run("support-recovery", config, 12345);
  const cli::ExperimentFiles b =
      cli::experiment_run("support-recovery", config, 12345);
  CHECK(a.csv == b.csv);
  CHECK(a.summary_json == b.summary_json);

  const json summary = json::parse(a.summary_json);
  CHECK(summary.at("kind") == "support-recovery");
  CHECK(summary.at("recovered_fraction").get<double>() ==
        doctest::Approx(1.0));
  // Header plus one line per instance, each carrying its seed.
  std::istringstream csv(a.csv);
  std::string line;
  std::getline(csv, line);
  CHECK(line ==
        "instance,seed,ic,lambda,lambda_lo,lambda_hi,support_match,"
        "oracle_rel_err");
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);

  const cli::ExperimentFiles c =
      cli::experiment_run("support-recovery", config, 999);
  CHECK(a.csv != c.csv); // a different seed draws different instances
}

TEST_CASE("command line binary end to end") {
  const std::string in = write_temp("peak.json", kPeakInstance);
  const std::string out =
      (fs::temp_directory_path() / "polygauge_tests" / "peak_report.json")
          .string();
  CHECK(run_cli("certify --in " + in + " --out " + out) == 0);
  const json doc = json::parse(slurp(out));
  CHECK(doc.at("records")[0].at("verdict") == "certified-positive");

  CHECK(run_cli("solve --in " + in + " --out " + out +
                " --method qp --lambda 0.05") == 0);
  const json qp = json::parse(slurp(out));
  CHECK(qp.at("records")[0].at("status") == "ok");

  // Exit code 2 when a precondition fails.
  const std::string bad = write_temp("bad.json", R"({
    "schema": 1,
    "phi": [[0.0, 1.0]],
    "h": {"kind": "linf", "n": 2},
    "x0": [0.0, 2.0]
  })");
  CHECK(run_cli("certify --in " + bad + " --out " + out) == 2);

  // Exit code 1 on hard errors.
  CHECK(run_cli("certify --in /nonexistent.json --out " + out) == 1);
  const std::string garbage = write_temp("garbage.json", "{");
  CHECK(run_cli("certify --in " + garbage + " --out " + out) == 1);

  // Experiment command writes both files.
  const std::string config = write_temp("exp.json", R"({
    "gauge": {"kind": "linf", "n": 4},
    "q": 5,
    "sigma": 0.02,
    "instances": 2
  })");
  const std::string exp_dir =
      (fs::temp_directory_path() / "polygauge_tests" / "exp_out").string();
  CHECK(run_cli("experiment --kind noise-scaling --config " + config +
                " --seed 7 --out-dir " + exp_dir) == 0);
  CHECK(fs::exists(fs::path(exp_dir) / "noise-scaling.csv"));
  CHECK(fs::exists(fs::path(exp_dir) / "noise-scaling_summary.json"));
}
