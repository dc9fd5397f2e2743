// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace polygauge::defaults {

/// Relative tolerance for H-support detection against J_H(x). Floating-point
/// ties at the max are the norm, not the exception.
inline constexpr double support_tol = 1e-9;

/// Looser support tolerance for iterative solver outputs, which sit near a
/// face rather than on it.
inline constexpr double loose_support_tol = 1e-6;

/// Every rank decision (kernels, pseudo-inverses, restricted injectivity)
/// uses this factor times the largest singular value.
inline constexpr double rank_tol = 1e-10;

/// Condition-number limit for the small Gram matrices inverted explicitly.
inline constexpr double condition_limit = 1e12;

/// Reduced-cost tolerance of the simplex solver.
inline constexpr double lp_reduced_cost_tol = 1e-10;

/// Primal feasibility tolerance of the simplex solver.
inline constexpr double lp_feasibility_tol = 1e-9;

/// Target on the max KKT residual of the quadratic-program solver.
inline constexpr double qp_tol = 1e-8;

/// A criterion value inside [-verdict_tol, +verdict_tol] is inconclusive.
inline constexpr double verdict_tol = 1e-8;

} // namespace polygauge::defaults
