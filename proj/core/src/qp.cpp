// SPDX-License-Identifier: Apache-2.0
#include "polygauge/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "polygauge/errors.hpp"
#include "polygauge/lp.hpp"
#include "polygauge/numlin.hpp"

namespace polygauge {

namespace {

// Deadband under which an iterate counts as the zero vector for support
// detection purposes.
constexpr double kZeroGauge = 1e-9;

// Longest step in [0, 1] keeping v + alpha dv strictly positive up to the
// fraction-to-boundary factor.
double step_length(const Eigen::VectorXd& v, const Eigen::VectorXd& dv,
                   double fraction) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0) alpha = std::min(alpha, -fraction * v[i] / dv[i]);
  return alpha;
}

void attach_face_info(SolveResult& result, const Eigen::MatrixXd& phi,
                      const HMatrix& h, const Eigen::VectorXd& y,
                      double lambda, double check_tol) {
  const double value = eval_gauge(h, result.x);
  const double scale = 1.0 + result.x.cwiseAbs().maxCoeff();
  if (value <= kZeroGauge * scale) return; // numerically zero solution
  result.support = h_support(h, result.x, defaults::loose_support_tol);
  if (lambda <= 0) return;
  const Eigen::MatrixXd h_i = submatrix(h, *result.support);
  if (!restricted_injectivity(phi, h_i)) return;
  try {
    result.optimality = verify_optimality(
        phi, h, y, lambda, result.x, defaults::loose_support_tol, check_tol);
  } catch (const Error&) {
    // Cross-check unavailable (degenerate face); the KKT residual stands.
  }
}

} // namespace

SolveResult solve_p_lambda(const Eigen::MatrixXd& phi, const HMatrix& h,
                           const Eigen::VectorXd& y, double lambda,
                           double tol) {
  if (!(lambda > 0)) throw InputError("lambda must be positive");
  if (phi.cols() != h.n())
    throw InputError("operator and gauge live in different dimensions");
  if (y.size() != phi.rows())
    throw InputError("observation vector has the wrong length");

  const Eigen::Index n = h.n();
  const Eigen::Index nv = n + 1;     // z = (x, t)
  const Eigen::Index m = h.n_cols(); // one inequality per column

  // min 0.5 z^T P z + q^T z  s.t.  A z + s = 0, s >= 0.
  Eigen::MatrixXd p_mat = Eigen::MatrixXd::Zero(nv, nv);
  p_mat.topLeftCorner(n, n) = phi.transpose() * phi;
  Eigen::VectorXd q(nv);
  q.head(n) = -phi.transpose() * y;
  q[n] = lambda;
  Eigen::MatrixXd a_mat(m, nv);
  a_mat.leftCols(n) = h.columns.transpose();
  a_mat.col(n).setConstant(-1.0);

  // Strictly feasible start: x = 0, t = 1 puts slack 1 on every row.
  Eigen::VectorXd z = Eigen::VectorXd::Zero(nv);
  z[n] = 1.0;
  Eigen::VectorXd s = -a_mat * z;
  Eigen::VectorXd dual = Eigen::VectorXd::Ones(m);

  // Run past the caller's target toward machine limits; the extra digits
  // are what make the oracle sharp enough to referee the closed form.
  const double tol_push = std::min(tol, 1e-12);
  const int max_iter = 200;
  double kkt = std::numeric_limits<double>::infinity();
  double best_kkt = kkt;
  Eigen::VectorXd best_z = z, best_s = s, best_dual = dual;
  int iter = 0;

  for (; iter < max_iter; ++iter) {
    const Eigen::VectorXd r_dual = p_mat * z + q + a_mat.transpose() * dual;
    const Eigen::VectorXd r_prim = a_mat * z + s;
    const double mu = s.dot(dual) / static_cast<double>(m);
    kkt = std::max({r_dual.cwiseAbs().maxCoeff(),
                    r_prim.cwiseAbs().maxCoeff(), mu});
    if (!std::isfinite(kkt))
      throw SolverFailure("interior-point iterates diverged");
    if (kkt < best_kkt) {
      best_kkt = kkt;
      best_z = z;
      best_s = s;
      best_dual = dual;
    }
    if (kkt <= tol_push) break;

    const Eigen::VectorXd d = dual.cwiseQuotient(s);
    Eigen::MatrixXd normal = p_mat;
    normal.noalias() += a_mat.transpose() * d.asDiagonal() * a_mat;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (ldlt.info() != Eigen::Success) {
      normal.diagonal().array() += 1e-11 * (1.0 + d.maxCoeff());
      ldlt.compute(normal);
      if (ldlt.info() != Eigen::Success) break; // use the best iterate
    }

    const auto solve_direction =
        [&](const Eigen::VectorXd& r_comp, Eigen::VectorXd& dz,
            Eigen::VectorXd& ds, Eigen::VectorXd& dnu) {
          const Eigen::VectorXd rhs =
              -r_dual + a_mat.transpose() *
                            (r_comp.cwiseQuotient(s) - d.cwiseProduct(r_prim));
          dz = ldlt.solve(rhs);
          ds = -r_prim - a_mat * dz;
          dnu = -(r_comp + dual.cwiseProduct(ds)).cwiseQuotient(s);
        };

    // Predictor.
    Eigen::VectorXd dz_aff, ds_aff, dnu_aff;
    solve_direction(s.cwiseProduct(dual), dz_aff, ds_aff, dnu_aff);
    const double ap_aff = step_length(s, ds_aff, 1.0);
    const double ad_aff = step_length(dual, dnu_aff, 1.0);
    const double mu_aff = (s + ap_aff * ds_aff).dot(dual + ad_aff * dnu_aff) /
                          static_cast<double>(m);
    const double ratio = mu_aff / mu;
    const double sigma = ratio * ratio * ratio;

    // Corrector.
    const Eigen::VectorXd r_comp = s.cwiseProduct(dual) +
                                   ds_aff.cwiseProduct(dnu_aff) -
                                   Eigen::VectorXd::Constant(m, sigma * mu);
    Eigen::VectorXd dz, ds, dnu;
    solve_direction(r_comp, dz, ds, dnu);

    const double alpha_p = step_length(s, ds, 0.995);
    const double alpha_d = step_length(dual, dnu, 0.995);
    if (alpha_p < 1e-13 && alpha_d < 1e-13) break; // numerical floor reached
    z += alpha_p * dz;
    s += alpha_p * ds;
    dual += alpha_d * dnu;
  }

  z = best_z;
  s = best_s;
  dual = best_dual;
  kkt = best_kkt;

  if (kkt > tol) {
    std::ostringstream msg;
    msg << "interior-point method stalled after " << iter
        << " iterations with KKT residual " << kkt << " (target " << tol
        << ")";
    throw SolverFailure(msg.str());
  }

  // Crossover polish: snap onto the active set the interior point found by
  // solving the equality-KKT saddle system. Kept only when it satisfies the
  // full first-order conditions tighter than the iterate.
  {
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < m; ++i)
      if (dual[i] > s[i]) active.push_back(i);
    const auto na = static_cast<Eigen::Index>(active.size());
    if (na > 0) {
      Eigen::MatrixXd saddle = Eigen::MatrixXd::Zero(nv + na, nv + na);
      saddle.topLeftCorner(nv, nv) = p_mat;
      for (Eigen::Index k = 0; k < na; ++k) {
        saddle.block(0, nv + k, nv, 1) = a_mat.row(active[k]).transpose();
        saddle.block(nv + k, 0, 1, nv) = a_mat.row(active[k]);
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv + na);
      rhs.head(nv) = -q;
      const Eigen::VectorXd sol =
          saddle.completeOrthogonalDecomposition().solve(rhs);
      const Eigen::VectorXd z_pol = sol.head(nv);
      const Eigen::VectorXd nu_pol = sol.tail(na);

      Eigen::VectorXd r_dual_pol = p_mat * z_pol + q;
      for (Eigen::Index k = 0; k < na; ++k)
        r_dual_pol += a_mat.row(active[k]).transpose() * nu_pol[k];
      const Eigen::VectorXd viol = a_mat * z_pol;
      const double scale = 1.0 + q.cwiseAbs().maxCoeff();
      const double kkt_pol =
          std::max({r_dual_pol.cwiseAbs().maxCoeff(),
                    std::max(0.0, viol.maxCoeff()),
                    std::max(0.0, -nu_pol.minCoeff())});
      if (kkt_pol <= std::min(kkt, 1e-10 * scale)) {
        z = z_pol;
        kkt = kkt_pol;
      }
    }
  }

  SolveResult result;
  result.iterations = iter;
  result.x = z.head(n);
  result.kkt_residual = kkt;
  result.objective = 0.5 * (y - phi * result.x).squaredNorm() +
                     lambda * eval_gauge(h, result.x);
  attach_face_info(result, phi, h, y, lambda, std::max(tol * 100, 1e-6));
  return result;
}

SolveResult solve_p0(const Eigen::MatrixXd& phi, const HMatrix& h,
                     const Eigen::VectorXd& y, double tol) {
  if (phi.cols() != h.n())
    throw InputError("operator and gauge live in different dimensions");
  if (y.size() != phi.rows())
    throw InputError("observation vector has the wrong length");

  const Eigen::Index n = h.n();
  const Eigen::Index q_dim = phi.rows();
  const Eigen::Index m = h.n_cols();

  SolveResult result;

  // Feasibility precheck at the toolkit rank tolerance.
  {
    const Eigen::VectorXd x_ls = pseudo_inverse(phi) * y;
    if ((phi * x_ls - y).norm() > 1e-9 * (1.0 + y.norm())) {
      result.status = SolveStatus::infeasible;
      return result;
    }
  }

  // Column-geometry dual of  min t  s.t.  H^T x <= t 1, phi x = y:
  //   max <y, nu>  s.t.  H v - phi^T nu = 0, <v, 1> = 1, v >= 0.
  // The primal minimizer is read off the multipliers: x = -(rows 0..N-1),
  // t = simplex row.
  LinearProgram lp;
  const Eigen::Index nvars = m + q_dim;
  lp.objective = Eigen::VectorXd::Zero(nvars);
  lp.objective.tail(q_dim) = y;
  lp.a_eq = Eigen::MatrixXd::Zero(n + 1, nvars);
  lp.a_eq.block(0, 0, n, m) = h.columns;
  lp.a_eq.block(0, m, n, q_dim) = -phi.transpose();
  lp.a_eq.row(n).head(m).setOnes();
  lp.b_eq = Eigen::VectorXd::Zero(n + 1);
  lp.b_eq[n] = 1.0;
  lp.lower =
      Eigen::VectorXd::Constant(nvars, -std::numeric_limits<double>::infinity());
  lp.lower.head(m).setZero();

  const LpSolution sol = solve_lp(lp);
  result.iterations = sol.iterations;
  if (sol.status == LpStatus::unbounded) {
    result.status = SolveStatus::infeasible; // y outside range(phi)
    return result;
  }
  if (sol.status != LpStatus::optimal)
    throw SolverFailure("equality-constrained gauge program did not solve");

  result.x = -sol.dual_eq.head(n);
  const double t_opt = sol.dual_eq[n];
  result.objective = eval_gauge(h, result.x);
  result.kkt_residual = std::max((phi * result.x - y).cwiseAbs().maxCoeff(),
                                 std::abs(result.objective - t_opt));
  if (result.kkt_residual >
      std::max(tol, 1e-8) * (1.0 + y.cwiseAbs().maxCoeff()))
    throw SolverFailure("recovered minimizer fails the optimality residuals");
  attach_face_info(result, phi, h, y, /*lambda=*/0.0, tol);
  return result;
}

} // namespace polygauge
