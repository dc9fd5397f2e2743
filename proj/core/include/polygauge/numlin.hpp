// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "polygauge/defaults.hpp"
#include "polygauge/gauge.hpp"

namespace polygauge {

/// Orthonormal basis of Ker A at the relative rank tolerance
/// rank_tol * sigma_max. May have zero columns (trivial kernel).
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& a,
                             double rank_tol = defaults::rank_tol);

/// Moore-Penrose pseudo-inverse at the same relative rank tolerance.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a,
                               double rank_tol = defaults::rank_tol);

/// Restricted injectivity: Ker phi and Ker h_i^* intersect trivially,
/// decided as nullity([phi; h_i^*]) == 0 at the rank tolerance.
bool restricted_injectivity(const Eigen::MatrixXd& phi,
                            const Eigen::MatrixXd& h_i,
                            double rank_tol = defaults::rank_tol);

/// Cached linear-algebra objects attached to a measurement operator and one
/// face (H-support) of the gauge ball. Immutable once constructed.
struct SupportGeometry {
  HSupport support;
  Eigen::MatrixXd u_basis;      // N x d, orthonormal basis of Ker H_I^*
  Eigen::MatrixXd m_matrix;     // d x d, (U^* phi^* phi U)^{-1}
  Eigen::MatrixXd gamma_perp;   // Q x Q, Id - phi U M U^* phi^*
  Eigen::MatrixXd hi_pinv_star; // N x |I|, (H_I^+)^*
  Eigen::MatrixXd phi_tilde;    // Q x |I|, phi (H_I^+)^*
  Eigen::MatrixXd ker_hi_basis; // |I| x k, orthonormal basis of Ker H_I

  Eigen::Index ambient_dim() const { return u_basis.rows(); }
  Eigen::Index obs_dim() const { return gamma_perp.rows(); }
  Eigen::Index face_dim() const { return u_basis.cols(); }
  Eigen::Index kernel_dim() const { return ker_hi_basis.cols(); }
};

/// Builds the geometry for the face I. Throws PreconditionError when
/// restricted injectivity fails and ConditioningError when the d x d Gram
/// matrix is numerically singular (condition number above the limit) or the
/// projector identities are violated on exit.
SupportGeometry support_geometry(const Eigen::MatrixXd& phi, const HMatrix& h,
                                 const HSupport& support,
                                 double rank_tol = defaults::rank_tol);

/// Same, with a caller-supplied basis of Ker H_I^* (columns must be
/// orthonormal and span the kernel). Certified quantities are invariant
/// under the choice; this entry point exists to exercise that.
SupportGeometry support_geometry_with_basis(const Eigen::MatrixXd& phi,
                                            const HMatrix& h,
                                            const HSupport& support,
                                            const Eigen::MatrixXd& u_basis,
                                            double rank_tol = defaults::rank_tol);

/// <u, v>_{Gamma_I^perp} = <u, Gamma_I^perp v>; symmetric, positive
/// semidefinite.
double gamma_inner(const SupportGeometry& geom, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& v);

} // namespace polygauge
