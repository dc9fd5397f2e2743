// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "polygauge/defaults.hpp"

namespace polygauge {

/// Column collection H = (h_1 .. h_{N_H}) of supporting hyperplane normals.
/// The induced gauge is J_H(x) = max_i <x, h_i> and its unit ball is the
/// polyhedron { x : J_H(x) <= 1 }.
///
/// Immutable after construction; safe for concurrent reads.
struct HMatrix {
  Eigen::MatrixXd columns; // N x N_H
  // Set by builders whose output is valid by construction (0 interior to
  // conv{h_i}); false only means "not known", not "invalid".
  bool known_valid = false;

  Eigen::Index n() const { return columns.rows(); }
  Eigen::Index n_cols() const { return columns.cols(); }
};

/// Checks shape and finiteness; throws InputError otherwise.
HMatrix make_hmatrix(Eigen::MatrixXd columns, bool known_valid = false);

/// Sorted, duplicate-free set of active column indices (0-based), together
/// with the relative tolerance used to detect them.
struct HSupport {
  std::vector<Eigen::Index> indices;
  double tol = defaults::support_tol;

  Eigen::Index size() const { return static_cast<Eigen::Index>(indices.size()); }
  bool same_indices(const HSupport& other) const {
    return indices == other.indices;
  }
};

/// Complement of a support inside {0 .. n_cols-1}.
std::vector<Eigen::Index> support_complement(const HSupport& support,
                                             Eigen::Index n_cols);

/// The submatrix H_I whose simplex image H_I * Delta_I is the
/// subdifferential of J_H at the detection point.
struct SubdiffDescriptor {
  Eigen::MatrixXd h_sub; // N x |I|
  HSupport index_set;
};

/// J_H(x) = max_i <x, h_i>. Works for any finite H; positivity away from 0
/// is only guaranteed for valid gauges.
double eval_gauge(const HMatrix& h, const Eigen::VectorXd& x);

/// Active set { i : <x, h_i> >= (1 - tol) * J_H(x) }. With tol = 0 this is
/// the exact H-support. Throws UndefinedSupportError when J_H(x) <= 0
/// (x = 0, or a direction an invalid gauge does not separate): every index
/// ties and no face is selected.
HSupport h_support(const HMatrix& h, const Eigen::VectorXd& x,
                   double tol = defaults::support_tol);

/// Columns of H restricted to h_support(h, x, tol).
SubdiffDescriptor subdifferential(const HMatrix& h, const Eigen::VectorXd& x,
                                  double tol = defaults::support_tol);

/// Extract H_I for an explicit index set.
Eigen::MatrixXd submatrix(const HMatrix& h, const HSupport& support);

/// Decides whether g = H_I v for some v in the canonical simplex
/// (v >= 0, <v,1> = 1), i.e. whether g is a subgradient of J_H at x.
/// Solved as an l1-residual LP; membership holds when the residual is within
/// feas_tol * (1 + |g|_1).
bool in_subdifferential(const HMatrix& h, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& g,
                        double support_tol = defaults::support_tol,
                        double feas_tol = defaults::lp_feasibility_tol);

struct GaugeValidity {
  bool valid = false;
  // On failure, a direction x != 0 with J_H(x) <= 0 (|x|_inf = 1).
  Eigen::VectorXd witness;
};

/// True iff 0 lies in the interior of conv{h_i}, equivalently J_H(x) > 0 for
/// every x != 0, equivalently the unit ball is bounded. Decided exactly by
/// linear programming: the conic hull of the columns must contain +-e_k for
/// every coordinate; an infeasibility certificate of one of those feasibility
/// programs is precisely a witness direction.
GaugeValidity is_valid_gauge(const HMatrix& h);

} // namespace polygauge
