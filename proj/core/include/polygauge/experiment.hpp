// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "polygauge/certify.hpp"
#include "polygauge/instance.hpp"

namespace polygauge {

/// Random ensemble: phi with i.i.d. standard normal entries and x0 drawn on
/// a target face of the gauge (sparse sign patterns for l1-type gauges, a
/// strict max coordinate for linf, a per-block peak for block gauges),
/// w = sigma * standard normal.
struct EnsembleConfig {
  HDescriptor gauge;
  Eigen::Index q = 0;
  double sigma = 0.0;
  Eigen::Index sparsity = 0; // faces of l1-type gauges; 0 = auto (~n/3)
  int max_attempts = 4000;   // rejection-sampling budget per accepted draw
};

struct DrawnInstance {
  std::uint64_t seed = 0;
  Eigen::MatrixXd phi;
  Eigen::VectorXd x0;
  Eigen::VectorXd w;
};

/// Deterministic draw for one seed (no filtering).
DrawnInstance draw_instance(const EnsembleConfig& config, const HMatrix& h,
                            std::uint64_t seed);

/// A draw that passed the positive-criterion filter: the face geometry, the
/// certificate and a nonempty admissible lambda interval for the drawn
/// noise. The noise may have been shrunk (deterministically, factors of 2)
/// to make the interval nonempty.
struct CertifiedDraw {
  DrawnInstance draw;
  HSupport support;
  SupportGeometry geom;
  Certificate cert;
  LambdaInterval interval;
};

/// Scans seeds child_seed(base_seed, attempt), attempt = attempt0, ...,
/// until a certified draw is found; updates `attempt` to the next unused
/// index. Throws SolverFailure when the attempt budget is exhausted.
CertifiedDraw next_certified(const EnsembleConfig& config, const HMatrix& h,
                             std::uint64_t base_seed, int& attempt);

/// A draw whose criterion is below `ic_threshold` (< 0).
struct NegativeDraw {
  DrawnInstance draw;
  HSupport support;
  SupportGeometry geom;
  Certificate cert;
  Constants consts;
};

NegativeDraw next_negative(const EnsembleConfig& config, const HMatrix& h,
                           std::uint64_t base_seed, int& attempt,
                           double ic_threshold);

/// A regularization weight strictly inside an interval (geometric midpoint).
double pick_lambda(const LambdaInterval& interval);

// ---------------------------------------------------------------------------
// Experiment families. All rows carry the seed that regenerates them.
// ---------------------------------------------------------------------------

struct NoiseScalingRow {
  int instance = 0;
  std::uint64_t seed = 0;
  double scale = 0.0;
  double lambda = 0.0;
  double noise_norm = 0.0;
  double error_l2 = 0.0;
  double ratio = 0.0; // error_l2 / noise_norm
  double ic = 0.0;
  bool in_range = false;
};

struct NoiseScalingResult {
  std::vector<NoiseScalingRow> rows;
  double max_spread = 0.0;      // worst per-instance (max-min)/min of ratio
  double pass_fraction = 0.0;   // instances with spread <= 10%
};

/// Fixed instances, noise scaled by {1, 1/2, 1/4, 1/8}, lambda =
/// lambda_factor * |w|_2; reports the recovery-error to noise-norm ratios.
NoiseScalingResult run_noise_scaling(const EnsembleConfig& config,
                                     double lambda_factor,
                                     const std::vector<double>& scalings,
                                     int instances, std::uint64_t seed);

struct SupportRecoveryRow {
  int instance = 0;
  std::uint64_t seed = 0;
  double ic = 0.0;
  double lambda = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  bool support_match = false;
  double oracle_rel_err = 0.0; // |x_cf - x_qp|_2 / max(1, |x_cf|_2)
};

struct SupportRecoveryResult {
  std::vector<SupportRecoveryRow> rows;
  double recovered_fraction = 0.0;
  double worst_oracle_err = 0.0;
};

/// Certified instances solved in closed form and by the independent
/// quadratic-program oracle; checks the face is recovered exactly.
SupportRecoveryResult run_support_recovery(const EnsembleConfig& config,
                                           int instances, std::uint64_t seed);

struct NegativeIcRow {
  int instance = 0;
  std::uint64_t seed = 0;
  double ic = 0.0;
  double lambda = 0.0;
  double noise_norm = 0.0;
  bool support_match = false; // expected false on every row
};

struct NegativeIcResult {
  std::vector<NegativeIcRow> rows;
  double mismatch_fraction = 0.0;
};

/// Instances with criterion below `ic_threshold`, tiny noise-to-lambda
/// ratio; the oracle solution's face must differ from the face of x0.
NegativeIcResult run_negative_ic(const EnsembleConfig& config, int instances,
                                 double noise_to_lambda, double ic_threshold,
                                 std::uint64_t seed);

} // namespace polygauge
