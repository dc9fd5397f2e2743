// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include <Eigen/Dense>

#include "polygauge/certify.hpp"
#include "polygauge/gauge.hpp"

namespace polygauge {

enum class SolveStatus { ok, infeasible };

/// Oracle solver output. `support` is detected at a loose tolerance (an
/// iterative solution sits near a face, not on it) and is absent when the
/// solution is numerically zero. `optimality` carries the independent
/// first-order cross-check when the detected face admits one.
struct SolveResult {
  SolveStatus status = SolveStatus::ok;
  Eigen::VectorXd x;
  double objective = 0.0;
  double kkt_residual = 0.0;
  std::optional<HSupport> support;
  std::optional<OptimalityCheck> optimality;
  int iterations = 0;
};

/// Solves  min_x 0.5 |y - phi x|^2 + lambda J_H(x)  through the epigraph
/// quadratic program  min 0.5 |y - phi x|^2 + lambda t, H^T x <= t 1,
/// with a primal-dual interior-point method run to `tol` on the max KKT
/// residual. Independent of the closed form it validates.
SolveResult solve_p_lambda(const Eigen::MatrixXd& phi, const HMatrix& h,
                           const Eigen::VectorXd& y, double lambda,
                           double tol = defaults::qp_tol);

/// Solves  min_x J_H(x)  s.t.  phi x = y  as a linear program (through its
/// column-geometry dual; the minimizer is read off the multipliers, so one
/// vertex is returned when the face is non-unique). `status == infeasible`
/// when y is outside the range of phi at the rank tolerance.
SolveResult solve_p0(const Eigen::MatrixXd& phi, const HMatrix& h,
                     const Eigen::VectorXd& y, double tol = defaults::qp_tol);

} // namespace polygauge
