// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "polygauge/defaults.hpp"

namespace polygauge {

/// Dense linear program in maximization form:
///
///   maximize   objective . z
///   subject to a_eq z  = b_eq
///              a_le z <= b_le
///              lower <= z <= upper   (componentwise, +-inf allowed)
///
/// Empty constraint blocks are encoded as 0-row matrices. Empty bound
/// vectors mean all variables are free.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd a_le;
  Eigen::VectorXd b_le;
  Eigen::VectorXd lower; // empty = all -inf
  Eigen::VectorXd upper; // empty = all +inf

  Eigen::Index num_vars() const { return objective.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

/// Solver output. When `status == optimal`, the multipliers satisfy the
/// stationarity convention
///
///   objective = a_eq^T dual_eq + a_le^T dual_le + (bound multipliers)
///
/// with dual_le >= 0 and complementary slackness on the `<=` rows. When
/// `status == infeasible`, `farkas` holds a certificate vector y over the
/// rows (eq rows first, then le rows) with y.b > 0 and y^T A <= 0 on every
/// column whose lower bound is 0 and upper bound is +inf.
struct LpSolution {
  LpStatus status = LpStatus::optimal;
  Eigen::VectorXd z;
  double value = 0.0;
  Eigen::VectorXd dual_eq;
  Eigen::VectorXd dual_le;
  Eigen::VectorXd farkas;
  double duality_gap = 0.0;
  int iterations = 0;
};

/// Bounded-variable two-phase revised primal simplex with Bland's rule.
/// Deterministic: identical input bits give identical output bits.
/// Throws SolverFailure if the iteration cap 50*(rows+cols) is hit.
LpSolution solve_lp(const LinearProgram& lp);

} // namespace polygauge
