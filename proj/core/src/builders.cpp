// SPDX-License-Identifier: Apache-2.0
#include "polygauge/builders.hpp"

#include <algorithm>
#include <sstream>

#include <Eigen/SVD>

#include "polygauge/errors.hpp"

namespace polygauge {

namespace {
constexpr Eigen::Index kMaxColumns = 1 << 16;
constexpr Eigen::Index kMaxSignDim = 16;
} // namespace

Eigen::Index Partition::dimension() const {
  Eigen::Index n = 0;
  for (const auto& block : blocks) n += static_cast<Eigen::Index>(block.size());
  return n;
}

Partition make_partition(std::vector<std::vector<Eigen::Index>> blocks) {
  if (blocks.empty()) throw InputError("partition has no blocks");
  Eigen::Index n = 0;
  for (const auto& block : blocks) {
    if (block.empty()) throw InputError("partition has an empty block");
    n += static_cast<Eigen::Index>(block.size());
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& block : blocks)
    for (const Eigen::Index i : block) {
      if (i < 0 || i >= n)
        throw InputError("partition indices must cover exactly {0..n-1}");
      if (seen[static_cast<std::size_t>(i)])
        throw InputError("partition blocks overlap");
      seen[static_cast<std::size_t>(i)] = true;
    }
  return Partition{std::move(blocks)};
}

HMatrix build_l1(Eigen::Index n) {
  if (n < 1) throw InputError("dimension must be positive");
  if (n > kMaxSignDim) {
    std::ostringstream msg;
    msg << "l1 construction needs 2^" << n
        << " columns; capped at 2^16. Supply explicit columns instead.";
    throw CapacityError(msg.str());
  }
  const Eigen::Index cols = Eigen::Index(1) << n;
  Eigen::MatrixXd h(n, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::Index bit = (c >> (n - 1 - r)) & 1;
      h(r, c) = bit ? -1.0 : 1.0;
    }
  return make_hmatrix(std::move(h), /*known_valid=*/true);
}

HMatrix build_linf(Eigen::Index n) {
  if (n < 1) throw InputError("dimension must be positive");
  Eigen::MatrixXd h(n, 2 * n);
  h << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  return make_hmatrix(std::move(h), /*known_valid=*/true);
}

HMatrix build_analysis_l1(const Eigen::MatrixXd& analysis_op) {
  const Eigen::Index p = analysis_op.rows();
  const Eigen::Index n = analysis_op.cols();
  if (p < 1 || n < 1) throw InputError("analysis operator is empty");
  if (!analysis_op.allFinite())
    throw InputError("analysis operator has non-finite entries");
  if (p > kMaxSignDim) {
    std::ostringstream msg;
    msg << "analysis-l1 construction needs 2^" << p
        << " columns; capped at 2^16. Supply explicit columns instead.";
    throw CapacityError(msg.str());
  }
  const HMatrix signs = build_l1(p);
  Eigen::MatrixXd h = analysis_op.transpose() * signs.columns;

  // J_H(x) = |Lx|_1 is a gauge iff Ker L = {0}.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(analysis_op);
  const bool injective =
      n <= p && svd.singularValues().minCoeff() >
                    defaults::rank_tol * svd.singularValues().maxCoeff();
  return make_hmatrix(std::move(h), /*known_valid=*/injective);
}

HMatrix build_block_l1_linf(const Partition& partition) {
  const Eigen::Index n = partition.dimension();
  // Re-validate: callers may have aggregated blocks by hand.
  const Partition checked = make_partition(partition.blocks);

  Eigen::Index cols = 1;
  for (const auto& block : checked.blocks) {
    cols *= 2 * static_cast<Eigen::Index>(block.size());
    if (cols > kMaxColumns)
      throw CapacityError(
          "block l1-linf construction exceeds 2^16 columns; supply explicit "
          "columns instead");
  }

  std::vector<std::vector<Eigen::Index>> sorted_blocks = checked.blocks;
  for (auto& block : sorted_blocks) std::sort(block.begin(), block.end());

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, cols);
  // Odometer over blocks; within a block the choice order is
  // (pos0,+), (pos0,-), (pos1,+), ...
  const std::size_t nblocks = sorted_blocks.size();
  std::vector<Eigen::Index> choice(nblocks, 0);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (std::size_t b = 0; b < nblocks; ++b) {
      const Eigen::Index pick = choice[b] / 2;
      const double sign = (choice[b] % 2 == 0) ? 1.0 : -1.0;
      h(sorted_blocks[b][static_cast<std::size_t>(pick)], c) = sign;
    }
    // Increment, last block fastest.
    for (std::size_t b = nblocks; b-- > 0;) {
      const Eigen::Index radix =
          2 * static_cast<Eigen::Index>(sorted_blocks[b].size());
      if (++choice[b] < radix) break;
      choice[b] = 0;
    }
  }
  return make_hmatrix(std::move(h), /*known_valid=*/true);
}

} // namespace polygauge
