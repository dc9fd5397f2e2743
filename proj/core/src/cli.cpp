// SPDX-License-Identifier: Apache-2.0
#include "polygauge/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "polygauge/certify.hpp"
#include "polygauge/errors.hpp"
#include "polygauge/experiment.hpp"
#include "polygauge/numlin.hpp"
#include "polygauge/qp.hpp"
#include "polygauge/report.hpp"
#include "polygauge/rng.hpp"

namespace polygauge::cli {

using nlohmann::json;

namespace {

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json support_to_json(const HSupport& s) {
  json a = json::array();
  for (const Eigen::Index i : s.indices) a.push_back(i + 1); // 1-based
  return a;
}

json envelope(const char* mode, const std::string& config_hash) {
  json doc;
  doc["schema"] = 1;
  doc["tool"] = "polygauge";
  doc["mode"] = mode;
  doc["rng"] = Xoshiro256pp::name();
  doc["config_hash"] = config_hash;
  return doc;
}

class StageClock {
public:
  explicit StageClock(bool enabled) : enabled_(enabled) {
    if (enabled_) start_ = std::chrono::steady_clock::now();
  }
  void report(json& rec) const {
    if (!enabled_) return;
    const auto stop = std::chrono::steady_clock::now();
    rec["timings_ms"] =
        std::chrono::duration<double, std::milli>(stop - start_).count();
  }

private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

int write_or_print(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return kExitHardError;
  }
  out << text;
  return kExitOk;
}

} // namespace

RunResult certify_instances(const std::vector<Instance>& instances,
                            const CertifyOptions& options,
                            const std::string& config_hash) {
  json doc = envelope("certify", config_hash);
  doc["support_tol"] = options.support_tol;
  json records = json::array();
  int exit_code = kExitOk;

  for (std::size_t idx = 0; idx < instances.size(); ++idx) {
    const Instance& inst = instances[idx];
    json rec;
    rec["index"] = idx;
    if (inst.seed) rec["seed"] = *inst.seed;
    StageClock clock(options.timings);

    try {
      const HMatrix h = build_gauge(inst.h_desc);
      const GaugeValidity validity = is_valid_gauge(h);
      rec["gauge_valid"] = validity.valid;
      if (!validity.valid) {
        rec["status"] = "precondition-failure";
        rec["message"] = "gauge is invalid: its unit ball is unbounded";
        rec["witness"] = to_json(validity.witness);
        exit_code = std::max(exit_code, kExitPreconditionFailure);
        clock.report(rec);
        records.push_back(rec);
        continue;
      }
      if (!inst.x0)
        throw PreconditionError("certification needs x0 in the instance");

      const HSupport support = h_support(h, *inst.x0, options.support_tol);
      rec["support"] = support_to_json(support);
      rec["mu0"] = eval_gauge(h, *inst.x0);

      const Eigen::MatrixXd h_i = submatrix(h, support);
      const bool ci = restricted_injectivity(inst.phi, h_i);
      rec["restricted_injectivity"] = ci;
      if (!ci)
        throw PreconditionError(
            "restricted injectivity fails on the face of x0");

      const SupportGeometry geom = support_geometry(inst.phi, h, support);
      const Certificate cert = ic(inst.phi, h, geom);
      rec["ic"] = cert.ic_value;
      rec["ic_gap"] = cert.lp_gap;
      rec["verdict"] = to_string(cert.verdict);
      rec["rho_sq"] = cert.constants.rho_sq;

      const Constants consts = constants(inst.phi, h, *inst.x0, geom);
      rec["constants"] = {{"c1", consts.c1},
                          {"c2", consts.c2},
                          {"t", consts.t},
                          {"rho_sq", consts.rho_sq}};

      if (cert.verdict == Verdict::certified_positive) {
        const LambdaInterval interval =
            lambda_range(inst.phi, h, *inst.x0, inst.noise(), geom, cert);
        rec["lambda_interval"] = {{"empty", interval.empty},
                                  {"lo", interval.lo},
                                  {"hi", interval.hi}};
        const DualCertificate dual =
            noiseless_certificate(inst.phi, h, *inst.x0, geom, cert);
        rec["noiseless_certificate"] = {
            {"source_residual", dual.source_residual},
            {"min_v", dual.min_v},
            {"sum_v", dual.sum_v}};
      }
      rec["status"] = "ok";
    } catch (const PreconditionError& e) {
      rec["status"] = "precondition-failure";
      rec["message"] = e.what();
      exit_code = std::max(exit_code, kExitPreconditionFailure);
    } catch (const UndefinedSupportError& e) {
      rec["status"] = "precondition-failure";
      rec["message"] = e.what();
      exit_code = std::max(exit_code, kExitPreconditionFailure);
    } catch (const ConditioningError& e) {
      rec["status"] = "precondition-failure";
      rec["message"] = e.what();
      exit_code = std::max(exit_code, kExitPreconditionFailure);
    } catch (const Error& e) {
      rec["status"] = "error";
      rec["message"] = e.what();
      exit_code = kExitHardError;
    }
    clock.report(rec);
    records.push_back(rec);
  }
  doc["records"] = records;
  return RunResult{exit_code, doc.dump(2) + "\n"};
}

RunResult solve_instances(const std::vector<Instance>& instances,
                          const SolveOptions& options,
                          const std::string& config_hash) {
  if (options.method != "closed-form" && options.method != "qp" &&
      options.method != "lp0")
    throw InputError("unknown method: " + options.method);

  json doc = envelope("solve", config_hash);
  doc["method"] = options.method;
  json records = json::array();
  int exit_code = kExitOk;

  for (std::size_t idx = 0; idx < instances.size(); ++idx) {
    const Instance& inst = instances[idx];
    json rec;
    rec["index"] = idx;
    rec["method"] = options.method;
    if (inst.seed) rec["seed"] = *inst.seed;
    StageClock clock(options.timings);

    try {
      const HMatrix h = build_gauge(inst.h_desc);
      const GaugeValidity validity = is_valid_gauge(h);
      if (!validity.valid)
        throw PreconditionError("gauge is invalid: its unit ball is unbounded");
      if (!inst.has_observation())
        throw PreconditionError("instance has neither y nor x0");
      const Eigen::VectorXd y = inst.observation();

      std::optional<double> lambda = options.lambda;
      if (!lambda) lambda = inst.lambda;

      if (options.method == "lp0") {
        const SolveResult r = solve_p0(inst.phi, h, y, options.tol);
        if (r.status == SolveStatus::infeasible) {
          rec["status"] = "infeasible";
        } else {
          rec["status"] = "ok";
          rec["x"] = to_json(r.x);
          rec["objective"] = r.objective;
          rec["kkt_residual"] = r.kkt_residual;
          rec["iterations"] = r.iterations;
          if (r.support) rec["support_recovered"] = support_to_json(*r.support);
        }
      } else {
        if (!lambda)
          throw PreconditionError("this method needs a lambda (flag or field)");
        if (options.method == "qp") {
          const SolveResult r =
              solve_p_lambda(inst.phi, h, y, *lambda, options.tol);
          rec["status"] = "ok";
          rec["x"] = to_json(r.x);
          rec["objective"] = r.objective;
          rec["kkt_residual"] = r.kkt_residual;
          rec["iterations"] = r.iterations;
          rec["lambda"] = *lambda;
          if (r.support) rec["support_recovered"] = support_to_json(*r.support);
          if (r.optimality) {
            rec["optimality"] = {{"feasible", r.optimality->feasible},
                                 {"relint", r.optimality->relint},
                                 {"min_v", r.optimality->min_v}};
          }
        } else { // closed-form
          if (!inst.x0)
            throw PreconditionError("closed-form needs x0 (it fixes the face)");
          const HSupport support = h_support(h, *inst.x0);
          const SupportGeometry geom = support_geometry(inst.phi, h, support);
          const Certificate cert = ic(inst.phi, h, geom);
          const ClosedForm cf =
              closed_form_solution(inst.phi, h, y, *lambda, geom);
          rec["status"] = "ok";
          rec["x"] = to_json(cf.x_hat);
          rec["mu"] = cf.mu;
          rec["lambda"] = *lambda;
          rec["verdict"] = to_string(cf.verdict);
          if (!cf.violated.empty()) rec["violated"] = cf.violated;
          rec["inside_residual"] = cf.inside_residual;
          rec["outside_margin"] = cf.outside_margin;
          rec["ic"] = cert.ic_value;
          const double obj = 0.5 * (y - inst.phi * cf.x_hat).squaredNorm() +
                             *lambda * eval_gauge(h, cf.x_hat);
          rec["objective"] = obj;
          if (cert.verdict == Verdict::certified_positive) {
            const LambdaInterval interval = lambda_range(
                inst.phi, h, *inst.x0, inst.noise(), geom, cert);
            rec["lambda_interval"] = {{"empty", interval.empty},
                                      {"lo", interval.lo},
                                      {"hi", interval.hi}};
            rec["lambda_in_range"] = interval.contains(*lambda);
          }
          try {
            rec["support_recovered"] =
                support_to_json(h_support(h, cf.x_hat));
          } catch (const UndefinedSupportError&) {
            rec["support_recovered"] = json::array();
          }
        }
      }
      if (inst.x0 && rec.contains("x")) {
        Eigen::VectorXd x(inst.x0->size());
        const auto& arr = rec.at("x");
        for (Eigen::Index i = 0; i < x.size(); ++i)
          x[i] = arr[static_cast<std::size_t>(i)].get<double>();
        rec["l2_error"] = (x - *inst.x0).norm();
        rec["support_true"] = support_to_json(h_support(h, *inst.x0));
      }
    } catch (const PreconditionError& e) {
      rec["status"] = "precondition-failure";
      rec["message"] = e.what();
      exit_code = std::max(exit_code, kExitPreconditionFailure);
    } catch (const UndefinedSupportError& e) {
      rec["status"] = "precondition-failure";
      rec["message"] = e.what();
      exit_code = std::max(exit_code, kExitPreconditionFailure);
    } catch (const Error& e) {
      rec["status"] = "error";
      rec["message"] = e.what();
      exit_code = kExitHardError;
    }
    clock.report(rec);
    records.push_back(rec);
  }
  doc["records"] = records;
  return RunResult{exit_code, doc.dump(2) + "\n"};
}

HDescriptor parse_gauge_descriptor(const std::string& json_text) {
  // The instance module owns the schema; wrap the descriptor in a minimal
  // probe instance (a zero row of the right width) and parse that.
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  json probe;
  probe["schema"] = 1;
  probe["h"] = j;
  Eigen::Index n = 0;
  const std::string kind = j.value("kind", "");
  if (kind == "l1" || kind == "linf")
    n = j.value("n", 0);
  else if (kind == "block") {
    for (const auto& b : j.value("blocks", json::array()))
      n += static_cast<Eigen::Index>(b.size());
  } else if (kind == "analysis_l1") {
    const auto& rows = j.value("L", json::array());
    n = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  } else if (kind == "explicit") {
    const auto& cols = j.value("columns", json::array());
    n = cols.empty() ? 0 : static_cast<Eigen::Index>(cols.front().size());
  }
  if (n < 1) throw InputError("gauge descriptor has no usable dimension");
  json zeros = json::array();
  for (Eigen::Index i = 0; i < n; ++i) zeros.push_back(0.0);
  probe["phi"] = json::array({zeros});
  const std::vector<Instance> parsed = parse_instances(probe.dump());
  return parsed.front().h_desc;
}

ExperimentFiles experiment_run(const std::string& kind,
                               const std::string& config_json,
                               std::uint64_t seed) {
  json cfg;
  try {
    cfg = json::parse(config_json);
  } catch (const json::exception& e) {
    throw InputError(std::string("config parse error: ") + e.what());
  }
  if (!cfg.is_object() || !cfg.contains("gauge"))
    throw InputError("experiment config needs a \"gauge\" descriptor");

  EnsembleConfig ens;
  ens.gauge = parse_gauge_descriptor(cfg.at("gauge").dump());
  ens.q = cfg.value("q", 0);
  if (ens.q < 1) throw InputError("experiment config needs q >= 1");
  ens.sigma = cfg.value("sigma", 0.05);
  ens.sparsity = cfg.value("sparsity", 0);
  ens.max_attempts = cfg.value("max_attempts", 4000);

  const std::string config_hash = json_fingerprint(config_json);

  json summary;
  summary["schema"] = 1;
  summary["tool"] = "polygauge";
  summary["kind"] = kind;
  summary["rng"] = Xoshiro256pp::name();
  summary["seed"] = seed;
  summary["config_hash"] = config_hash;

  ExperimentFiles out;

  if (kind == "noise-scaling") {
    const double lambda_factor = cfg.value("lambda_factor", 2.0);
    std::vector<double> scalings = {1.0, 0.5, 0.25, 0.125};
    if (cfg.contains("scalings"))
      scalings = cfg.at("scalings").get<std::vector<double>>();
    const int instances = cfg.value("instances", 10);
    const NoiseScalingResult r =
        run_noise_scaling(ens, lambda_factor, scalings, instances, seed);

    std::vector<std::vector<std::string>> rows;
    for (const auto& row : r.rows)
      rows.push_back({std::to_string(row.instance), std::to_string(row.seed),
                      format_number(row.scale), format_number(row.lambda),
                      format_number(row.noise_norm),
                      format_number(row.error_l2), format_number(row.ratio),
                      format_number(row.ic)});
    out.csv = make_csv({"instance", "seed", "scale", "lambda", "noise_norm",
                        "error_l2", "ratio", "ic"},
                       rows);
    summary["instances"] = instances;
    summary["max_ratio_spread"] = r.max_spread;
    summary["pass_fraction_10pct"] = r.pass_fraction;
  } else if (kind == "support-recovery") {
    const int instances = cfg.value("instances", 50);
    const SupportRecoveryResult r = run_support_recovery(ens, instances, seed);
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : r.rows)
      rows.push_back({std::to_string(row.instance), std::to_string(row.seed),
                      format_number(row.ic), format_number(row.lambda),
                      format_number(row.lambda_lo),
                      format_number(row.lambda_hi),
                      row.support_match ? "1" : "0",
                      format_number(row.oracle_rel_err)});
    out.csv = make_csv({"instance", "seed", "ic", "lambda", "lambda_lo",
                        "lambda_hi", "support_match", "oracle_rel_err"},
                       rows);
    summary["instances"] = instances;
    summary["recovered_fraction"] = r.recovered_fraction;
    summary["worst_oracle_err"] = r.worst_oracle_err;
  } else if (kind == "negative-ic") {
    const int instances = cfg.value("instances", 20);
    const double noise_to_lambda = cfg.value("noise_to_lambda", 1e-3);
    const double ic_threshold = cfg.value("ic_threshold", -1e-4);
    const NegativeIcResult r =
        run_negative_ic(ens, instances, noise_to_lambda, ic_threshold, seed);
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : r.rows)
      rows.push_back({std::to_string(row.instance), std::to_string(row.seed),
                      format_number(row.ic), format_number(row.lambda),
                      format_number(row.noise_norm),
                      row.support_match ? "1" : "0"});
    out.csv = make_csv(
        {"instance", "seed", "ic", "lambda", "noise_norm", "support_match"},
        rows);
    summary["instances"] = instances;
    summary["mismatch_fraction"] = r.mismatch_fraction;
  } else {
    throw InputError("unknown experiment kind: " + kind);
  }

  out.summary_json = summary.dump(2) + "\n";
  out.exit_code = kExitOk;
  return out;
}

int cmd_certify(const std::string& in_path, const std::string& out_path,
                const CertifyOptions& options) {
  try {
    std::ifstream in(in_path);
    if (!in) {
      std::cerr << "cannot open " << in_path << "\n";
      return kExitHardError;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const std::vector<Instance> instances = parse_instances(text);
    const RunResult r =
        certify_instances(instances, options, json_fingerprint(text));
    const int io_code = write_or_print(out_path, r.report_json);
    return io_code != kExitOk ? io_code : r.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHardError;
  }
}

int cmd_solve(const std::string& in_path, const std::string& out_path,
              const SolveOptions& options) {
  try {
    std::ifstream in(in_path);
    if (!in) {
      std::cerr << "cannot open " << in_path << "\n";
      return kExitHardError;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const std::vector<Instance> instances = parse_instances(text);
    const RunResult r =
        solve_instances(instances, options, json_fingerprint(text));
    const int io_code = write_or_print(out_path, r.report_json);
    return io_code != kExitOk ? io_code : r.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHardError;
  }
}

int cmd_experiment(const std::string& kind, const std::string& config_path,
                   std::uint64_t seed, const std::string& out_dir) {
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open " << config_path << "\n";
      return kExitHardError;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const ExperimentFiles files = experiment_run(kind, buf.str(), seed);

    std::filesystem::create_directories(out_dir);
    const auto csv_path = std::filesystem::path(out_dir) / (kind + ".csv");
    const auto sum_path =
        std::filesystem::path(out_dir) / (kind + "_summary.json");
    {
      std::ofstream csv(csv_path, std::ios::binary);
      if (!csv) {
        std::cerr << "cannot write " << csv_path.string() << "\n";
        return kExitHardError;
      }
      csv << files.csv;
    }
    {
      std::ofstream sum(sum_path, std::ios::binary);
      if (!sum) {
        std::cerr << "cannot write " << sum_path.string() << "\n";
        return kExitHardError;
      }
      sum << files.summary_json;
    }
    return files.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHardError;
  }
}

} // namespace polygauge::cli
