// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polygauge/gauge.hpp"

namespace polygauge {

/// Portable description of a gauge: either a builder recipe or explicit
/// columns. This is what the JSON instance format carries.
struct HDescriptor {
  enum class Kind { l1, linf, block, analysis_l1, explicit_columns };

  Kind kind = Kind::linf;
  Eigen::Index n = 0;                            // l1, linf
  std::vector<std::vector<Eigen::Index>> blocks; // block (0-based)
  Eigen::MatrixXd analysis_op;                   // analysis_l1 (P x N)
  Eigen::MatrixXd columns;                       // explicit (N x N_H)

  Eigen::Index dimension() const;
};

/// Materializes the gauge matrix.
HMatrix build_gauge(const HDescriptor& desc);

/// One problem instance: observations y = phi x0 + w with a gauge attached.
struct Instance {
  Eigen::MatrixXd phi; // Q x N
  HDescriptor h_desc;
  std::optional<Eigen::VectorXd> x0;
  std::optional<Eigen::VectorXd> w; // materialized noise (from w or sigma)
  std::optional<double> sigma;
  std::optional<std::uint64_t> noise_seed;
  std::optional<double> lambda;
  std::optional<Eigen::VectorXd> y_explicit;
  std::optional<std::uint64_t> seed; // reproducibility tag

  Eigen::Index n() const { return phi.cols(); }
  Eigen::Index q() const { return phi.rows(); }

  bool has_observation() const { return y_explicit.has_value() || x0.has_value(); }

  /// Explicit y when present; otherwise phi x0 + w (w defaulting to zero).
  Eigen::VectorXd observation() const;

  /// Noise actually applied to the observation (zero vector when none).
  Eigen::VectorXd noise() const;
};

/// Parses the versioned instance JSON ("schema": 1). Accepts either a single
/// instance object or {"instances": [...]} batches. Indices in the JSON
/// (partition blocks, reported supports) are 1-based; the in-memory
/// representation is 0-based. Throws InputError on malformed input.
std::vector<Instance> parse_instances(const std::string& json_text);

/// Reads and parses an instance file.
std::vector<Instance> load_instances(const std::string& path);

/// Canonical FNV-1a 64-bit fingerprint of a JSON document (independent of
/// key order and whitespace), as 16 hex digits.
std::string json_fingerprint(const std::string& json_text);

} // namespace polygauge
