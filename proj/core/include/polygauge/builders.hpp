// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "polygauge/gauge.hpp"

namespace polygauge {

/// Disjoint index blocks (0-based) covering {0 .. n-1}.
struct Partition {
  std::vector<std::vector<Eigen::Index>> blocks;

  Eigen::Index dimension() const;
};

/// Validates disjointness and coverage; throws InputError otherwise.
Partition make_partition(std::vector<std::vector<Eigen::Index>> blocks);

/// H for the l1 norm: all 2^n sign patterns {-1,+1}^n as columns, in
/// lexicographic order with +1 before -1 per coordinate (coordinate 0 is the
/// most significant). n <= 16; beyond that the dense column set does not fit
/// and explicit-column input should be used instead.
HMatrix build_l1(Eigen::Index n);

/// H for the l-infinity norm: [Id_n, -Id_n], columns e_1..e_n, -e_1..-e_n.
HMatrix build_linf(Eigen::Index n);

/// H = L^T * H_l1(P) for an analysis operator L (P x N), so that
/// J_H(x) = |L x|_1. P <= 16. The result is a valid gauge iff L has a
/// trivial kernel (the builder checks and marks it).
HMatrix build_analysis_l1(const Eigen::MatrixXd& analysis_op);

/// H for the block l1-linf norm J(x) = sum_b max_{i in b} |x_i|: one column
/// per choice, over blocks, of (position within block, sign), zeros
/// elsewhere. Blocks in partition order form the odometer (first block most
/// significant); within a block, positions ascending with + before -.
/// Capacity: prod_b 2|b| <= 2^16.
HMatrix build_block_l1_linf(const Partition& partition);

} // namespace polygauge
