// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polygauge/defaults.hpp"
#include "polygauge/instance.hpp"

namespace polygauge::cli {

/// Exit code contract: 0 full success, 2 when any per-instance precondition
/// failure was recorded (the run continues), 1 on hard errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitHardError = 1;
inline constexpr int kExitPreconditionFailure = 2;

struct CertifyOptions {
  double support_tol = defaults::support_tol;
  bool timings = false; // off by default: reports stay byte-identical
};

struct SolveOptions {
  std::string method = "closed-form"; // closed-form | qp | lp0
  std::optional<double> lambda;       // overrides the instance lambda
  double tol = defaults::qp_tol;
  bool timings = false;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string report_json;
};

/// Certification pipeline over a batch: face of x0, restricted injectivity,
/// criterion, constants, admissible lambda interval, dual certificate.
RunResult certify_instances(const std::vector<Instance>& instances,
                            const CertifyOptions& options,
                            const std::string& config_hash);

/// Solver pipeline over a batch with the chosen method.
RunResult solve_instances(const std::vector<Instance>& instances,
                          const SolveOptions& options,
                          const std::string& config_hash);

struct ExperimentFiles {
  int exit_code = kExitOk;
  std::string csv;
  std::string summary_json;
};

/// Runs one experiment family from its JSON configuration.
/// kind: noise-scaling | support-recovery | negative-ic.
ExperimentFiles experiment_run(const std::string& kind,
                               const std::string& config_json,
                               std::uint64_t seed);

/// Gauge descriptor from a standalone JSON object (same schema as the "h"
/// field of instance files).
HDescriptor parse_gauge_descriptor(const std::string& json_text);

// File-level entry points used by the command line tool. An empty out_path
// prints the report to stdout.
int cmd_certify(const std::string& in_path, const std::string& out_path,
                const CertifyOptions& options);
int cmd_solve(const std::string& in_path, const std::string& out_path,
              const SolveOptions& options);
int cmd_experiment(const std::string& kind, const std::string& config_path,
                   std::uint64_t seed, const std::string& out_dir);

} // namespace polygauge::cli
