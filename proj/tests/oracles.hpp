// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles, independent of the implementation paths they check:
// vertex enumeration for linear programs, concave grid/ternary search for
// kernel maximizations, direct norm formulas, soft thresholding.
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

struct LpVertexOptimum {
  Eigen::VectorXd x;
  double value = 0.0;
};

// Brute-force maximum of c.x over {a x <= b} by enumerating all n-subsets of
// rows, solving the square systems and keeping the feasible maximum. The
// feasible set must be bounded with a nonempty interior for this to be the
// true optimum. Returns nullopt when no feasible vertex exists.
inline std::optional<LpVertexOptimum> brute_force_lp_max(
    const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
    const Eigen::VectorXd& b) {
  const Eigen::Index n = c.size();
  const Eigen::Index m = a.rows();
  std::optional<LpVertexOptimum> best;
  std::vector<Eigen::Index> pick(static_cast<std::size_t>(n));

  const auto consider = [&](const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd sys(n, n);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      sys.row(i) = a.row(rows[static_cast<std::size_t>(i)]);
      rhs[i] = b[rows[static_cast<std::size_t>(i)]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd x = lu.solve(rhs);
    if (((a * x - b).array() > 1e-9).any()) return;
    const double value = c.dot(x);
    if (!best || value > best->value) best = LpVertexOptimum{x, value};
  };

  // Enumerate subsets of size n out of m rows.
  const auto recurse = [&](auto&& self, Eigen::Index start,
                           Eigen::Index depth) -> void {
    if (depth == n) {
      consider(pick);
      return;
    }
    for (Eigen::Index r = start; r < m; ++r) {
      pick[static_cast<std::size_t>(depth)] = r;
      self(self, r + 1, depth + 1);
    }
  };
  if (m >= n) recurse(recurse, 0, 0);
  return best;
}

// Concave maximization of f over [lo, hi]^k (k = 1 or 2) by nested ternary
// search: exact for concave functions up to the iteration tolerance.
template <typename F>
double ternary_max_1d(const F& f, double lo, double hi, int iters = 200) {
  for (int it = 0; it < iters; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2))
      lo = m1;
    else
      hi = m2;
  }
  return f(0.5 * (lo + hi));
}

template <typename F>
double ternary_max_2d(const F& f, double lo, double hi, int outer = 120,
                      int inner = 120) {
  const auto best_inner = [&](double c1) {
    return ternary_max_1d([&](double c2) { return f(c1, c2); }, lo, hi, inner);
  };
  double a = lo, b = hi;
  for (int it = 0; it < outer; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (best_inner(m1) < best_inner(m2))
      a = m1;
    else
      b = m2;
  }
  return best_inner(0.5 * (a + b));
}

// Kernel-search oracle for the identifiability criterion:
// max over z in span(kernel) of min_i (gain + z)_i, searched over kernel
// coordinates in a box that provably contains the maximizer.
inline double kernel_search_max_min(const Eigen::VectorXd& gain,
                                    const Eigen::MatrixXd& kernel) {
  const Eigen::Index card = gain.size();
  const auto value = [&](const Eigen::VectorXd& coeff) {
    return (gain + kernel * coeff).minCoeff();
  };
  if (kernel.cols() == 0) return gain.minCoeff();

  // Any maximizer satisfies f(c) >= f(0) = min g; since <z, 1> = 0 forces
  // min_i z_i <= -|z|_2 / (sqrt(card) (card - 1)), coordinates beyond
  // radius r0 only lose.
  const double spread = gain.maxCoeff() - gain.minCoeff();
  const double r0 =
      std::sqrt(static_cast<double>(card)) * (card - 1) * (spread + 1.0) + 1.0;

  if (kernel.cols() == 1) {
    return ternary_max_1d(
        [&](double c) { return value(Eigen::VectorXd::Constant(1, c)); }, -r0,
        r0);
  }
  if (kernel.cols() == 2) {
    return ternary_max_2d(
        [&](double c1, double c2) {
          Eigen::VectorXd c(2);
          c << c1, c2;
          return value(c);
        },
        -r0, r0);
  }
  return std::numeric_limits<double>::quiet_NaN(); // oracle limited to k <= 2
}

// Componentwise soft threshold (the l1 closed form under an orthonormal
// operator).
inline Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - t;
    out[i] = mag > 0 ? (v[i] > 0 ? mag : -mag) : 0.0;
  }
  return out;
}

inline double linf_norm(const Eigen::VectorXd& v) {
  return v.cwiseAbs().maxCoeff();
}
inline double l1_norm(const Eigen::VectorXd& v) { return v.cwiseAbs().sum(); }

} // namespace oracles
