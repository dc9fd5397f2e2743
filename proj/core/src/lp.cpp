// SPDX-License-Identifier: Apache-2.0
#include "polygauge/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "polygauge/errors.hpp"

namespace polygauge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState : std::uint8_t { at_lower, at_upper, at_zero_free, basic };

// Internal standard form: min cost.z  s.t.  a z = b,  lo <= z <= hi.
struct Tableau {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd cost;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

struct SimplexState {
  std::vector<int> basis;       // column index per row
  std::vector<VarState> state;  // per column
  Eigen::VectorXd x;            // per column
  int iterations = 0;
};

// Bounded-variable primal simplex, Bland's rule throughout. Basic values are
// re-solved from the fresh factorization every iteration, so no drift
// accumulates across degenerate pivots. Returns false on an unbounded ray.
bool simplex(const Tableau& t, SimplexState& s, int iteration_cap) {
  const Eigen::Index m = t.a.rows();
  const Eigen::Index n = t.a.cols();
  Eigen::MatrixXd basis_mat(m, m);
  Eigen::VectorXd cb(m), rhs(m);

  while (true) {
    if (++s.iterations > iteration_cap) {
      std::ostringstream msg;
      msg << "simplex stalled after " << s.iterations - 1
          << " iterations (rows=" << m << ", cols=" << n << ")";
      throw SolverFailure(msg.str());
    }

    for (Eigen::Index i = 0; i < m; ++i) {
      basis_mat.col(i) = t.a.col(s.basis[i]);
      cb[i] = t.cost[s.basis[i]];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_mat);

    rhs = t.b;
    for (Eigen::Index j = 0; j < n; ++j)
      if (s.state[j] != VarState::basic && s.x[j] != 0.0)
        rhs -= t.a.col(j) * s.x[j];
    const Eigen::VectorXd xb = lu.solve(rhs);
    for (Eigen::Index i = 0; i < m; ++i) s.x[s.basis[i]] = xb[i];

    const Eigen::VectorXd y = lu.transpose().solve(cb);
    const Eigen::VectorXd rc = t.cost - t.a.transpose() * y;

    // Entering column: lowest index among violations (Bland).
    int enter = -1;
    int dir = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (s.state[j] == VarState::basic || t.lo[j] == t.hi[j]) continue;
      const double d = rc[j];
      if (s.state[j] == VarState::at_lower &&
          d < -defaults::lp_reduced_cost_tol) {
        enter = static_cast<int>(j);
        dir = +1;
        break;
      }
      if (s.state[j] == VarState::at_upper &&
          d > defaults::lp_reduced_cost_tol) {
        enter = static_cast<int>(j);
        dir = -1;
        break;
      }
      if (s.state[j] == VarState::at_zero_free &&
          std::abs(d) > defaults::lp_reduced_cost_tol) {
        enter = static_cast<int>(j);
        dir = d < 0 ? +1 : -1;
        break;
      }
    }
    if (enter < 0) return true; // optimal

    const Eigen::VectorXd w = lu.solve(t.a.col(enter));

    // Ratio test: the entering variable moves by dir*theta (theta >= 0) and
    // the basic variable on row i moves with velocity -dir*w_i.
    constexpr double piv_eps = 1e-11;
    double theta = kInf;
    int leave_row = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double v = -dir * w[i];
      const int bj = s.basis[i];
      double cap = kInf;
      if (v > piv_eps && t.hi[bj] < kInf)
        cap = (t.hi[bj] - s.x[bj]) / v;
      else if (v < -piv_eps && t.lo[bj] > -kInf)
        cap = (t.lo[bj] - s.x[bj]) / v;
      if (cap < 0.0) cap = 0.0;
      if (cap < theta - 1e-13) {
        theta = cap;
        leave_row = static_cast<int>(i);
      } else if (cap < theta + 1e-13 && leave_row >= 0 &&
                 bj < s.basis[leave_row]) {
        leave_row = static_cast<int>(i); // Bland tie-break on variable index
      }
    }
    double self_cap = kInf;
    if (dir > 0 && t.hi[enter] < kInf) self_cap = t.hi[enter] - s.x[enter];
    if (dir < 0 && t.lo[enter] > -kInf) self_cap = s.x[enter] - t.lo[enter];

    if (self_cap <= theta) {
      if (self_cap == kInf) return false; // unbounded ray
      // Bound flip: no basis change.
      s.x[enter] = dir > 0 ? t.hi[enter] : t.lo[enter];
      s.state[enter] = dir > 0 ? VarState::at_upper : VarState::at_lower;
      continue;
    }

    s.x[enter] += dir * theta;
    const int leaving = s.basis[leave_row];
    const double v_leave = -dir * w[leave_row];
    s.state[leaving] = v_leave > 0 ? VarState::at_upper : VarState::at_lower;
    s.x[leaving] = v_leave > 0 ? t.hi[leaving] : t.lo[leaving];
    s.basis[static_cast<std::size_t>(leave_row)] = enter;
    s.state[enter] = VarState::basic;
  }
}

double bound_or(const Eigen::VectorXd& v, Eigen::Index i, double fallback) {
  return v.size() == 0 ? fallback : v[i];
}

Eigen::VectorXd dual_vector(const Tableau& t, const SimplexState& s) {
  const Eigen::Index m = t.a.rows();
  Eigen::MatrixXd basis_mat(m, m);
  Eigen::VectorXd cb(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    basis_mat.col(i) = t.a.col(s.basis[i]);
    cb[i] = t.cost[s.basis[i]];
  }
  return basis_mat.transpose().partialPivLu().solve(cb);
}

} // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const Eigen::Index n = lp.num_vars();
  const Eigen::Index m_eq = lp.a_eq.rows();
  const Eigen::Index m_le = lp.a_le.rows();
  const Eigen::Index m = m_eq + m_le;

  if ((m_eq > 0 && lp.a_eq.cols() != n) || (m_le > 0 && lp.a_le.cols() != n) ||
      lp.b_eq.size() != m_eq || lp.b_le.size() != m_le)
    throw InputError("linear program has inconsistent dimensions");
  if (lp.lower.size() != 0 && lp.lower.size() != n)
    throw InputError("lower bound vector has wrong length");
  if (lp.upper.size() != 0 && lp.upper.size() != n)
    throw InputError("upper bound vector has wrong length");
  if (!lp.objective.allFinite())
    throw InputError("linear program objective has non-finite entries");
  if ((m_eq > 0 && !(lp.a_eq.allFinite() && lp.b_eq.allFinite())) ||
      (m_le > 0 && !(lp.a_le.allFinite() && lp.b_le.allFinite())))
    throw InputError("linear program constraints have non-finite entries");

  // Columns: structurals, slacks (one per <= row), artificials (one per row).
  const Eigen::Index n_slack = m_le;
  const Eigen::Index n_total = n + n_slack + m;

  Tableau t;
  t.a = Eigen::MatrixXd::Zero(m, n_total);
  t.b.resize(m);
  t.cost = Eigen::VectorXd::Zero(n_total);
  t.lo = Eigen::VectorXd::Constant(n_total, -kInf);
  t.hi = Eigen::VectorXd::Constant(n_total, kInf);

  if (m_eq > 0) {
    t.a.block(0, 0, m_eq, n) = lp.a_eq;
    t.b.head(m_eq) = lp.b_eq;
  }
  if (m_le > 0) {
    t.a.block(m_eq, 0, m_le, n) = lp.a_le;
    t.b.tail(m_le) = lp.b_le;
    t.a.block(m_eq, n, m_le, m_le) = Eigen::MatrixXd::Identity(m_le, m_le);
    t.lo.segment(n, n_slack).setZero();
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    t.lo[j] = bound_or(lp.lower, j, -kInf);
    t.hi[j] = bound_or(lp.upper, j, kInf);
    if (t.lo[j] > t.hi[j]) throw InputError("variable bounds cross");
  }

  SimplexState s;
  s.state.assign(static_cast<std::size_t>(n_total), VarState::at_lower);
  s.x = Eigen::VectorXd::Zero(n_total);
  for (Eigen::Index j = 0; j < n + n_slack; ++j) {
    if (t.lo[j] > -kInf) {
      s.state[j] = VarState::at_lower;
      s.x[j] = t.lo[j];
    } else if (t.hi[j] < kInf) {
      s.state[j] = VarState::at_upper;
      s.x[j] = t.hi[j];
    } else {
      s.state[j] = VarState::at_zero_free;
      s.x[j] = 0.0;
    }
  }

  Eigen::VectorXd residual = t.b;
  for (Eigen::Index j = 0; j < n + n_slack; ++j)
    if (s.x[j] != 0.0) residual -= t.a.col(j) * s.x[j];

  s.basis.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index col = n + n_slack + i;
    t.a(i, col) = residual[i] < 0 ? -1.0 : 1.0;
    t.lo[col] = 0.0;
    t.cost[col] = 1.0;
    s.basis[static_cast<std::size_t>(i)] = static_cast<int>(col);
    s.state[static_cast<std::size_t>(col)] = VarState::basic;
    s.x[col] = std::abs(residual[i]);
  }

  const int cap = 50 * static_cast<int>(m + n_total);
  LpSolution sol;

  // Phase 1: drive the artificial infeasibility to zero.
  if (!simplex(t, s, cap))
    throw SolverFailure("phase-1 simplex reported an unbounded ray");

  const double b_scale = m > 0 ? t.b.cwiseAbs().maxCoeff() : 0.0;
  const double feas_eps = defaults::lp_feasibility_tol * (1.0 + b_scale);
  if (m > 0 && s.x.tail(m).sum() > feas_eps) {
    sol.status = LpStatus::infeasible;
    sol.farkas = dual_vector(t, s); // y.b > 0, y^T a_j <= 0 on cone columns
    sol.iterations = s.iterations;
    return sol;
  }

  // Phase 2: pin artificials at zero, optimize the real objective.
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index col = n + n_slack + i;
    t.hi[col] = 0.0;
    t.cost[col] = 0.0;
    if (s.state[col] != VarState::basic) {
      s.state[col] = VarState::at_lower;
      s.x[col] = 0.0;
    }
  }
  t.cost.head(n) = -lp.objective; // maximize -> minimize

  const bool bounded = simplex(t, s, cap);
  sol.iterations = s.iterations;
  if (!bounded) {
    sol.status = LpStatus::unbounded;
    return sol;
  }

  sol.status = LpStatus::optimal;
  sol.z = s.x.head(n);
  sol.value = lp.objective.dot(sol.z);

  // Multipliers in maximize convention:
  //   objective = a_eq^T dual_eq + a_le^T dual_le + bound multipliers,
  // dual_le >= 0, complementary on inactive rows.
  const Eigen::VectorXd y = dual_vector(t, s);
  sol.dual_eq = -y.head(m_eq);
  sol.dual_le = -y.tail(m_le);

  double dual_value = lp.b_eq.dot(sol.dual_eq) + lp.b_le.dot(sol.dual_le);
  const Eigen::VectorXd rc = t.cost - t.a.transpose() * y;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (s.state[j] == VarState::basic) continue;
    if (s.state[j] == VarState::at_lower && t.lo[j] != 0.0)
      dual_value += -rc[j] * t.lo[j];
    else if (s.state[j] == VarState::at_upper && t.hi[j] != 0.0)
      dual_value += -rc[j] * t.hi[j];
  }
  sol.duality_gap = std::abs(sol.value - dual_value);
  return sol;
}

} // namespace polygauge
