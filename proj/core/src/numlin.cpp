// SPDX-License-Identifier: Apache-2.0
#include "polygauge/numlin.hpp"

#include <limits>
#include <sstream>

#include <Eigen/SVD>

#include "polygauge/errors.hpp"

namespace polygauge {

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& a, double rank_tol) {
  if (!a.allFinite()) throw InputError("matrix has non-finite entries");
  const Eigen::Index n = a.cols();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = sv.size() > 0 ? rank_tol * sv.maxCoeff() : 0.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double rank_tol) {
  if (!a.allFinite()) throw InputError("matrix has non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cut = sv.size() > 0 ? rank_tol * sv.maxCoeff() : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) inv[i] = 1.0 / sv[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

bool restricted_injectivity(const Eigen::MatrixXd& phi,
                            const Eigen::MatrixXd& h_i, double rank_tol) {
  if (phi.cols() != h_i.rows())
    throw InputError("operator and face columns live in different dimensions");
  Eigen::MatrixXd stacked(phi.rows() + h_i.cols(), phi.cols());
  stacked.topRows(phi.rows()) = phi;
  stacked.bottomRows(h_i.cols()) = h_i.transpose();
  return kernel_basis(stacked, rank_tol).cols() == 0;
}

SupportGeometry support_geometry_with_basis(const Eigen::MatrixXd& phi,
                                            const HMatrix& h,
                                            const HSupport& support,
                                            const Eigen::MatrixXd& u_basis,
                                            double rank_tol) {
  if (phi.cols() != h.n())
    throw InputError("operator and gauge live in different dimensions");
  if (!phi.allFinite()) throw InputError("operator has non-finite entries");
  if (support.size() < 1) throw InputError("support is empty");

  const Eigen::Index q = phi.rows();
  const Eigen::MatrixXd h_i = submatrix(h, support);

  if (!restricted_injectivity(phi, h_i, rank_tol))
    throw PreconditionError(
        "restricted injectivity fails: the operator is singular on the face "
        "model subspace");

  SupportGeometry g;
  g.support = support;
  g.u_basis = u_basis;

  if (u_basis.cols() > 0) {
    const Eigen::MatrixXd phi_u = phi * u_basis;
    const Eigen::MatrixXd gram = phi_u.transpose() * phi_u;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0) || hi / lo > defaults::condition_limit) {
      std::ostringstream msg;
      msg << "face Gram matrix numerically singular (cond ~ "
          << (lo > 0 ? hi / lo : std::numeric_limits<double>::infinity())
          << "); rank tolerance mismatch";
      throw ConditioningError(msg.str());
    }
    g.m_matrix = gram.llt().solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
    g.gamma_perp = Eigen::MatrixXd::Identity(q, q) -
                   phi_u * g.m_matrix * phi_u.transpose();
  } else {
    g.m_matrix.resize(0, 0);
    g.gamma_perp = Eigen::MatrixXd::Identity(q, q);
  }

  g.hi_pinv_star = pseudo_inverse(h_i, rank_tol).transpose();
  g.phi_tilde = phi * g.hi_pinv_star;
  g.ker_hi_basis = kernel_basis(h_i, rank_tol);

  // Construction-time invariants.
  const double tol = 1e-10;
  const double scale = 1.0 + phi.cwiseAbs().maxCoeff();
  if ((g.gamma_perp - g.gamma_perp.transpose()).cwiseAbs().maxCoeff() > tol ||
      (g.gamma_perp * g.gamma_perp - g.gamma_perp).cwiseAbs().maxCoeff() > tol)
    throw ConditioningError("face projector identities violated");
  if (g.u_basis.cols() > 0) {
    if ((g.gamma_perp * (phi * g.u_basis)).cwiseAbs().maxCoeff() > tol * scale)
      throw ConditioningError("face projector does not annihilate phi U");
    if ((h_i.transpose() * g.u_basis).cwiseAbs().maxCoeff() > 1e-8)
      throw ConditioningError("supplied basis does not span Ker H_I^*");
  }

  return g;
}

SupportGeometry support_geometry(const Eigen::MatrixXd& phi, const HMatrix& h,
                                 const HSupport& support, double rank_tol) {
  const Eigen::MatrixXd h_i = submatrix(h, support);
  const Eigen::MatrixXd u = kernel_basis(h_i.transpose(), rank_tol);
  return support_geometry_with_basis(phi, h, support, u, rank_tol);
}

double gamma_inner(const SupportGeometry& geom, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& v) {
  if (u.size() != geom.obs_dim() || v.size() != geom.obs_dim())
    throw InputError("vectors do not live in the observation space");
  return u.dot(geom.gamma_perp * v);
}

} // namespace polygauge
