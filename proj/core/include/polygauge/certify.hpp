// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <Eigen/Dense>

#include "polygauge/gauge.hpp"
#include "polygauge/numlin.hpp"

namespace polygauge {

enum class Verdict { certified_positive, certified_negative, inconclusive };

const char* to_string(Verdict v);

/// Per-face constants controlling how much noise the face tolerates:
///   c1  - outside-correlation amplification of the face shift
///   c2  - outside-correlation amplification of the noise (l2->linf norm)
///   t   - the margin J(x0) - max_{j outside} <h_j, x0>  (> 0 on exact faces)
///   rho_sq - squared projected norm of the face vector
struct Constants {
  double c1 = 0.0;
  double c2 = 0.0;
  double t = 0.0;
  double rho_sq = 0.0;
};

/// Identifiability criterion of a face: the best worst-coordinate of the
/// projected face correlation shifted along Ker H_I. Positive means the face
/// is stable to small noise; negative means it cannot be recovered.
struct Certificate {
  double ic_value = 0.0;
  Eigen::VectorXd z_star; // maximizing kernel shift, length |I|
  Constants constants;    // rho_sq always set; c1/c2/t need an x0 (else NaN)
  Verdict verdict = Verdict::inconclusive;
  double lp_gap = 0.0;    // duality gap of the criterion program (error bar)
};

/// The projected face correlation vector g = phi_tilde^T Gamma_perp
/// phi_tilde 1 whose shifted minimum the criterion maximizes.
Eigen::VectorXd criterion_gain(const SupportGeometry& geom);

/// Computes the identifiability criterion for the face of `geom`.
/// When Ker H_I = {0} no program is needed and the value is min_i g_i;
/// otherwise the linear program  max r  s.t.  r <= g_i + (K c)_i  is solved
/// over kernel coordinates c. Throws PreconditionError when the face vector
/// phi_tilde 1 vanishes.
Certificate ic(const Eigen::MatrixXd& phi, const HMatrix& h,
               const SupportGeometry& geom);

/// Convenience overload that builds the geometry first.
Certificate ic(const Eigen::MatrixXd& phi, const HMatrix& h,
               const HSupport& support);

/// Always goes through the linear program, including trivial kernels.
/// Exists so the no-kernel closed form can be cross-checked against it.
Certificate ic_via_lp(const Eigen::MatrixXd& phi, const HMatrix& h,
                      const SupportGeometry& geom);

/// The face constants for a concrete x0 whose exact H-support is the face of
/// `geom`. Throws PreconditionError when x0 does not sit on that face or
/// when no column is outside the face (t undefined).
Constants constants(const Eigen::MatrixXd& phi, const HMatrix& h,
                    const Eigen::VectorXd& x0, const SupportGeometry& geom);

/// Closed-form candidate minimizer on a fixed face.
struct ClosedForm {
  Eigen::VectorXd x_hat;
  double mu = 0.0;          // gauge value of x_hat on the face
  HSupport support;         // the face the solution was built on
  Eigen::VectorXd v_tilde;  // simplex witness from the optimality check
  double lambda = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::string violated;         // first violated condition when inconclusive
  double inside_residual = 0.0; // |H_I^T x_hat - mu 1|_inf
  double outside_margin = 0.0;  // mu - max_{j outside} <h_j, x_hat>
};

/// The unique face-restricted minimizer of the regularized problem,
///   x_hat = mu H_I^{+,*} 1 + U M U^* phi^* (y - mu phi_tilde 1),
///   mu    = (<phi_tilde 1, y>_{Gamma_perp} - lambda) / rho^2,
/// certified only when mu > 0, the in-face equalities hold, the
/// out-of-face correlations stay strictly below mu, and the simplex witness
/// is interior. Throws PreconditionError when rho^2 = 0 or lambda <= 0.
ClosedForm closed_form_solution(const Eigen::MatrixXd& phi, const HMatrix& h,
                                const Eigen::VectorXd& y, double lambda,
                                const SupportGeometry& geom);

/// First-order optimality check of an arbitrary candidate.
struct OptimalityCheck {
  HSupport support;       // detected face of the candidate
  Eigen::VectorXd v;      // best simplex witness
  double min_v = 0.0;
  double sum_v = 0.0;
  double stationarity_residual = 0.0; // |U^T phi^T (phi x - y)|_inf
  bool feasible = false;  // candidate satisfies the first-order conditions
  bool relint = false;    // witness interior => unique minimizer
};

/// Detects the face of x_hat, then maximizes the worst witness coordinate
/// over kernel shifts. `feasible == false` is the refusal: no simplex
/// witness exists and x_hat is not a minimizer at this lambda.
OptimalityCheck verify_optimality(const Eigen::MatrixXd& phi, const HMatrix& h,
                                  const Eigen::VectorXd& y, double lambda,
                                  const Eigen::VectorXd& x_hat,
                                  double support_tol = defaults::support_tol,
                                  double stationarity_tol = 1e-8);

/// Open interval of regularization weights.
struct LambdaInterval {
  bool empty = true;
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double lambda) const {
    return !empty && lambda > lo && lambda < hi;
  }
};

/// Exact admissible set of lambda for the face of `geom`, the signal x0 and
/// the concrete noise w (empty vector = noiseless): the intersection of
///   (i)   mu > 0,
///   (ii)  the outside-correlation bound stays strictly below mu,
///   (iii) a kernel shift makes the tilted simplex witness interior,
/// where (i)-(ii) are solved in closed form and (iii) by bisection on its
/// linear program (the admissible set of (iii) is an interval by concavity).
/// Requires a positive criterion.
LambdaInterval lambda_range(const Eigen::MatrixXd& phi, const HMatrix& h,
                            const Eigen::VectorXd& x0,
                            const Eigen::VectorXd& w,
                            const SupportGeometry& geom,
                            const Certificate& cert);

/// Dual certificate (eta, v) for noiseless identifiability:
///   eta = Gamma_perp phi_tilde 1 / rho^2,   v = (z_star + g) / rho^2,
/// satisfying phi^* eta = H_I v with v interior to the simplex whenever the
/// criterion is positive; x0 is then the unique equality-constrained
/// minimizer. Throws PreconditionError when the criterion is not positive.
struct DualCertificate {
  Eigen::VectorXd eta; // Q
  Eigen::VectorXd v;   // |I|
  double source_residual = 0.0; // |phi^T eta - H_I v|_inf
  double min_v = 0.0;
  double sum_v = 0.0;
};

DualCertificate noiseless_certificate(const Eigen::MatrixXd& phi,
                                      const HMatrix& h,
                                      const Eigen::VectorXd& x0,
                                      const SupportGeometry& geom,
                                      const Certificate& cert);

} // namespace polygauge
