// SPDX-License-Identifier: Apache-2.0
#include "polygauge/gauge.hpp"

#include <cmath>
#include <sstream>

#include "polygauge/errors.hpp"
#include "polygauge/lp.hpp"

namespace polygauge {

HMatrix make_hmatrix(Eigen::MatrixXd columns, bool known_valid) {
  if (columns.rows() < 1 || columns.cols() < 1)
    throw InputError("H must have at least one row and one column");
  if (!columns.allFinite())
    throw InputError("H has non-finite entries");
  return HMatrix{std::move(columns), known_valid};
}

std::vector<Eigen::Index> support_complement(const HSupport& support,
                                             Eigen::Index n_cols) {
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(n_cols) - support.indices.size());
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n_cols; ++i) {
    if (k < support.indices.size() && support.indices[k] == i)
      ++k;
    else
      out.push_back(i);
  }
  return out;
}

static void check_point(const HMatrix& h, const Eigen::VectorXd& x) {
  if (x.size() != h.n()) {
    std::ostringstream msg;
    msg << "point has length " << x.size() << ", gauge lives in dimension "
        << h.n();
    throw InputError(msg.str());
  }
  if (!x.allFinite()) throw InputError("point has non-finite entries");
}

double eval_gauge(const HMatrix& h, const Eigen::VectorXd& x) {
  check_point(h, x);
  return (h.columns.transpose() * x).maxCoeff();
}

HSupport h_support(const HMatrix& h, const Eigen::VectorXd& x, double tol) {
  check_point(h, x);
  if (tol < 0) throw InputError("support tolerance must be nonnegative");
  const Eigen::VectorXd corr = h.columns.transpose() * x;
  const double value = corr.maxCoeff();
  if (!(value > 0))
    throw UndefinedSupportError(
        "H-support undefined: the gauge does not separate this point "
        "(x = 0, or an invalid gauge direction)");
  HSupport support;
  support.tol = tol;
  const double cut = (1.0 - tol) * value;
  for (Eigen::Index i = 0; i < corr.size(); ++i)
    if (corr[i] >= cut) support.indices.push_back(i);
  return support;
}

Eigen::MatrixXd submatrix(const HMatrix& h, const HSupport& support) {
  Eigen::MatrixXd sub(h.n(), support.size());
  for (Eigen::Index k = 0; k < support.size(); ++k) {
    const Eigen::Index i = support.indices[static_cast<std::size_t>(k)];
    if (i < 0 || i >= h.n_cols())
      throw InputError("support index out of range");
    sub.col(k) = h.columns.col(i);
  }
  return sub;
}

SubdiffDescriptor subdifferential(const HMatrix& h, const Eigen::VectorXd& x,
                                  double tol) {
  HSupport support = h_support(h, x, tol);
  Eigen::MatrixXd sub = submatrix(h, support);
  return SubdiffDescriptor{std::move(sub), std::move(support)};
}

bool in_subdifferential(const HMatrix& h, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& g, double support_tol,
                        double feas_tol) {
  check_point(h, g);
  const SubdiffDescriptor sd = subdifferential(h, x, support_tol);
  const Eigen::Index card = sd.index_set.size();
  const Eigen::Index n = h.n();

  // min |H_I v - g|_1 over the simplex, written with residual splits
  // p, q >= 0:  H_I v + p - q = g, <v,1> = 1.
  LinearProgram lp;
  const Eigen::Index nv = card + 2 * n;
  lp.objective = Eigen::VectorXd::Zero(nv);
  lp.objective.segment(card, 2 * n).setConstant(-1.0); // maximize -(p+q)
  lp.a_eq = Eigen::MatrixXd::Zero(n + 1, nv);
  lp.a_eq.block(0, 0, n, card) = sd.h_sub;
  lp.a_eq.block(0, card, n, n) = Eigen::MatrixXd::Identity(n, n);
  lp.a_eq.block(0, card + n, n, n) = -Eigen::MatrixXd::Identity(n, n);
  lp.a_eq.row(n).head(card).setOnes();
  lp.b_eq = Eigen::VectorXd::Zero(n + 1);
  lp.b_eq.head(n) = g;
  lp.b_eq[n] = 1.0;
  lp.lower = Eigen::VectorXd::Zero(nv);

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal)
    throw SolverFailure("subdifferential membership program did not solve");
  const double residual = -sol.value;
  return residual <= feas_tol * (1.0 + g.cwiseAbs().sum());
}

GaugeValidity is_valid_gauge(const HMatrix& h) {
  GaugeValidity result;
  if (h.known_valid) {
    result.valid = true;
    return result;
  }
  const Eigen::Index n = h.n();

  // 0 interior to conv{h_i}  <=>  cone{h_i} = R^N  <=>  +-e_k reachable as
  // a nonnegative combination for every k. An infeasible direction's Farkas
  // vector d satisfies <d, h_i> <= 0 for all i and <d, +-e_k> > 0, i.e.
  // J_H(d) <= 0 with d != 0.
  for (Eigen::Index k = 0; k < n; ++k) {
    for (const double sign : {1.0, -1.0}) {
      LinearProgram lp;
      lp.objective = Eigen::VectorXd::Zero(h.n_cols());
      lp.a_eq = h.columns;
      lp.b_eq = Eigen::VectorXd::Zero(n);
      lp.b_eq[k] = sign;
      lp.lower = Eigen::VectorXd::Zero(h.n_cols());
      const LpSolution sol = solve_lp(lp);
      if (sol.status == LpStatus::infeasible) {
        Eigen::VectorXd witness = sol.farkas;
        const double scale = witness.cwiseAbs().maxCoeff();
        if (scale > 0) witness /= scale;
        result.valid = false;
        result.witness = witness;
        return result;
      }
      if (sol.status != LpStatus::optimal)
        throw SolverFailure("gauge validity feasibility program did not solve");
    }
  }
  result.valid = true;
  return result;
}

} // namespace polygauge
