// SPDX-License-Identifier: Apache-2.0
#include "polygauge/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "polygauge/errors.hpp"
#include "polygauge/lp.hpp"

namespace polygauge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelintTol = 1e-9;

Eigen::VectorXd face_vector(const SupportGeometry& geom) {
  return geom.phi_tilde * Eigen::VectorXd::Ones(geom.support.size());
}

double rho_squared(const SupportGeometry& geom, const Eigen::VectorXd& f) {
  return f.dot(geom.gamma_perp * f);
}

struct MaxMin {
  double value = 0.0;
  Eigen::VectorXd shift; // the kernel vector K c*, length |I|
  double gap = 0.0;
};

// max over z in Ker H_I of min_i (base + z)_i, through kernel coordinates.
// Bounded exactly when the all-ones vector is orthogonal to Ker H_I, which
// holds for every reachable face.
MaxMin max_min_over_kernel(const Eigen::VectorXd& base,
                           const Eigen::MatrixXd& kernel) {
  MaxMin out;
  const Eigen::Index card = base.size();
  const Eigen::Index k = kernel.cols();
  if (k == 0) {
    out.value = base.minCoeff();
    out.shift = Eigen::VectorXd::Zero(card);
    return out;
  }
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(1 + k);
  lp.objective[0] = 1.0;
  lp.a_le.resize(card, 1 + k);
  lp.a_le.col(0).setOnes();
  lp.a_le.rightCols(k) = -kernel;
  lp.b_le = base;
  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::unbounded)
    throw PreconditionError(
        "index set does not define a reachable face: kernel shifts are "
        "unbounded");
  if (sol.status != LpStatus::optimal)
    throw SolverFailure("criterion program did not solve");
  out.value = sol.value;
  out.shift = kernel * sol.z.tail(k);
  out.gap = sol.duality_gap;
  return out;
}

void require_face_vector(const Eigen::VectorXd& f) {
  if (f.cwiseAbs().maxCoeff() <= 1e-12)
    throw PreconditionError(
        "face vector phi_tilde 1 vanishes; the criterion is undefined here");
}

Verdict verdict_of(double ic_value) {
  if (ic_value > defaults::verdict_tol) return Verdict::certified_positive;
  if (ic_value < -defaults::verdict_tol) return Verdict::certified_negative;
  return Verdict::inconclusive;
}

} // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::certified_positive: return "certified-positive";
    case Verdict::certified_negative: return "certified-negative";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Eigen::VectorXd criterion_gain(const SupportGeometry& geom) {
  const Eigen::VectorXd f = face_vector(geom);
  return geom.phi_tilde.transpose() * (geom.gamma_perp * f);
}

Certificate ic(const Eigen::MatrixXd& phi, const HMatrix& h,
               const SupportGeometry& geom) {
  (void)phi;
  (void)h;
  const Eigen::VectorXd f = face_vector(geom);
  require_face_vector(f);

  Certificate cert;
  cert.constants.c1 = std::numeric_limits<double>::quiet_NaN();
  cert.constants.c2 = std::numeric_limits<double>::quiet_NaN();
  cert.constants.t = std::numeric_limits<double>::quiet_NaN();
  cert.constants.rho_sq = rho_squared(geom, f);

  const Eigen::VectorXd gain = criterion_gain(geom);
  const MaxMin mm = max_min_over_kernel(gain, geom.ker_hi_basis);
  cert.ic_value = mm.value;
  cert.z_star = mm.shift;
  cert.lp_gap = mm.gap;
  cert.verdict = verdict_of(cert.ic_value);
  return cert;
}

Certificate ic(const Eigen::MatrixXd& phi, const HMatrix& h,
               const HSupport& support) {
  return ic(phi, h, support_geometry(phi, h, support));
}

Certificate ic_via_lp(const Eigen::MatrixXd& phi, const HMatrix& h,
                      const SupportGeometry& geom) {
  (void)phi;
  (void)h;
  const Eigen::VectorXd f = face_vector(geom);
  require_face_vector(f);
  const Eigen::VectorXd gain = criterion_gain(geom);

  // Force the program even for a trivial kernel.
  Eigen::MatrixXd kernel = geom.ker_hi_basis;
  MaxMin mm;
  if (kernel.cols() == 0) {
    LinearProgram lp;
    lp.objective = Eigen::VectorXd::Ones(1);
    lp.a_le = Eigen::MatrixXd::Ones(gain.size(), 1);
    lp.b_le = gain;
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
      throw SolverFailure("criterion program did not solve");
    mm.value = sol.value;
    mm.shift = Eigen::VectorXd::Zero(gain.size());
    mm.gap = sol.duality_gap;
  } else {
    mm = max_min_over_kernel(gain, kernel);
  }

  Certificate cert;
  cert.constants.c1 = std::numeric_limits<double>::quiet_NaN();
  cert.constants.c2 = std::numeric_limits<double>::quiet_NaN();
  cert.constants.t = std::numeric_limits<double>::quiet_NaN();
  cert.constants.rho_sq = rho_squared(geom, f);
  cert.ic_value = mm.value;
  cert.z_star = mm.shift;
  cert.lp_gap = mm.gap;
  cert.verdict = verdict_of(cert.ic_value);
  return cert;
}

Constants constants(const Eigen::MatrixXd& phi, const HMatrix& h,
                    const Eigen::VectorXd& x0, const SupportGeometry& geom) {
  const Eigen::Index card = geom.support.size();
  const double mu0 = eval_gauge(h, x0);
  if (!(mu0 > 0))
    throw PreconditionError("x0 has no face: its gauge value is not positive");

  const Eigen::MatrixXd h_i = submatrix(h, geom.support);
  const Eigen::VectorXd on_face =
      h_i.transpose() * x0 - mu0 * Eigen::VectorXd::Ones(card);
  if (on_face.cwiseAbs().maxCoeff() > 1e-8 * (1.0 + mu0))
    throw PreconditionError("x0 does not lie on the face of this geometry");

  const auto outside = support_complement(geom.support, h.n_cols());
  if (outside.empty())
    throw PreconditionError(
        "every column is active at x0; the outside margin is undefined");

  Constants k;
  const Eigen::VectorXd f = face_vector(geom);
  k.rho_sq = rho_squared(geom, f);

  const Eigen::VectorXd face_shift =
      geom.hi_pinv_star * Eigen::VectorXd::Ones(card);
  Eigen::VectorXd shift_dir; // [U M U^* phi^* phi - Id] H_I^{+,*} 1
  Eigen::MatrixXd noise_map; // U M U^* phi^*  (N x Q)
  if (geom.face_dim() > 0) {
    noise_map = geom.u_basis * geom.m_matrix *
                (phi * geom.u_basis).transpose();
    shift_dir = noise_map * (phi * face_shift) - face_shift;
  } else {
    noise_map = Eigen::MatrixXd::Zero(h.n(), phi.rows());
    shift_dir = -face_shift;
  }

  double c1 = 0.0, c2 = 0.0, worst_outside = -kInf;
  for (const Eigen::Index j : outside) {
    const Eigen::VectorXd hj = h.columns.col(j);
    c1 = std::max(c1, std::abs(hj.dot(shift_dir)));
    c2 = std::max(c2, (noise_map.transpose() * hj).norm());
    worst_outside = std::max(worst_outside, hj.dot(x0));
  }
  k.c1 = c1;
  k.c2 = c2;
  k.t = mu0 - worst_outside;
  if (!(k.t > 0))
    throw PreconditionError(
        "no outside margin: the support is not the exact face of x0");
  return k;
}

ClosedForm closed_form_solution(const Eigen::MatrixXd& phi, const HMatrix& h,
                                const Eigen::VectorXd& y, double lambda,
                                const SupportGeometry& geom) {
  if (!(lambda > 0)) throw PreconditionError("lambda must be positive");
  if (y.size() != phi.rows())
    throw InputError("observation vector has the wrong length");

  const Eigen::Index card = geom.support.size();
  const Eigen::VectorXd f = face_vector(geom);
  const double rho_sq = rho_squared(geom, f);
  if (!(rho_sq > 1e-14))
    throw PreconditionError(
        "projected face vector vanishes (rho^2 = 0); mu is undefined");

  ClosedForm out;
  out.lambda = lambda;
  out.support = geom.support;

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(card);
  out.mu = (f.dot(geom.gamma_perp * y) - lambda) / rho_sq;

  out.x_hat = out.mu * (geom.hi_pinv_star * ones);
  if (geom.face_dim() > 0) {
    const Eigen::MatrixXd phi_u = phi * geom.u_basis;
    out.x_hat += geom.u_basis *
                 (geom.m_matrix * (phi_u.transpose() * (y - out.mu * f)));
  }

  const Eigen::MatrixXd h_i = submatrix(h, geom.support);
  out.inside_residual =
      (h_i.transpose() * out.x_hat - out.mu * ones).cwiseAbs().maxCoeff();

  const auto outside = support_complement(geom.support, h.n_cols());
  double worst = -kInf;
  for (const Eigen::Index j : outside)
    worst = std::max(worst, h.columns.col(j).dot(out.x_hat));
  out.outside_margin = outside.empty() ? kInf : out.mu - worst;

  const Eigen::VectorXd v0 =
      geom.phi_tilde.transpose() * (geom.gamma_perp * (y - out.mu * f)) /
      lambda;
  const MaxMin mm = max_min_over_kernel(v0, geom.ker_hi_basis);
  out.v_tilde = v0 + mm.shift;
  const double sum_v = out.v_tilde.sum();

  out.verdict = Verdict::inconclusive;
  if (!(out.mu > 0))
    out.violated = "mu_not_positive";
  else if (out.inside_residual > 1e-8 * (1.0 + std::abs(out.mu)))
    out.violated = "inside_equalities";
  else if (!(out.outside_margin > 0))
    out.violated = "outside_strict_inequalities";
  else if (std::abs(sum_v - 1.0) > 1e-9)
    out.violated = "witness_sum";
  else if (!(mm.value > kRelintTol))
    out.violated = "witness_not_interior";
  else
    out.verdict = Verdict::certified_positive;
  return out;
}

OptimalityCheck verify_optimality(const Eigen::MatrixXd& phi, const HMatrix& h,
                                  const Eigen::VectorXd& y, double lambda,
                                  const Eigen::VectorXd& x_hat,
                                  double support_tol,
                                  double stationarity_tol) {
  if (!(lambda > 0)) throw PreconditionError("lambda must be positive");
  const double mu = eval_gauge(h, x_hat);
  OptimalityCheck out;
  out.support = h_support(h, x_hat, support_tol); // throws if x_hat faceless

  const SupportGeometry geom = support_geometry(phi, h, out.support);
  if (geom.face_dim() > 0)
    out.stationarity_residual =
        (geom.u_basis.transpose() * (phi.transpose() * (phi * x_hat - y)))
            .cwiseAbs()
            .maxCoeff();

  const Eigen::VectorXd f = face_vector(geom);
  const Eigen::VectorXd v0 =
      geom.phi_tilde.transpose() * (geom.gamma_perp * (y - mu * f)) / lambda;
  const MaxMin mm = max_min_over_kernel(v0, geom.ker_hi_basis);
  out.v = v0 + mm.shift;
  out.min_v = mm.value;
  out.sum_v = out.v.sum();

  const double scale = 1.0 + (phi.transpose() * y).cwiseAbs().maxCoeff();
  out.feasible = out.stationarity_residual <= stationarity_tol * scale &&
                 out.min_v >= -kRelintTol &&
                 std::abs(out.sum_v - 1.0) <= kRelintTol + stationarity_tol;
  out.relint = out.feasible && out.min_v > kRelintTol;
  return out;
}

namespace {

// Condition (iii) of the admissible-lambda set: some kernel shift makes the
// tilted witness interior at this lambda.
struct WitnessPredicate {
  const Eigen::VectorXd& gain;
  const Eigen::MatrixXd& kernel;
  const Eigen::VectorXd& w_corr; // phi_tilde^T Gamma_perp w
  double wip;                    // <phi_tilde 1, w>_{Gamma_perp}
  double rho_sq;

  bool operator()(double lambda) const {
    const double delta = (lambda - wip) / rho_sq;
    const Eigen::VectorXd base = (delta / lambda) * gain + w_corr / lambda;
    return max_min_over_kernel(base, kernel).value > kRelintTol;
  }
};

double bisect_boundary(const WitnessPredicate& pred, double lo, bool lo_holds,
                       double hi) {
  // Invariant: pred(lo) == lo_holds, pred(hi) == !lo_holds.
  for (int it = 0; it < 80 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid) == lo_holds)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

LambdaInterval lambda_range(const Eigen::MatrixXd& phi, const HMatrix& h,
                            const Eigen::VectorXd& x0,
                            const Eigen::VectorXd& w,
                            const SupportGeometry& geom,
                            const Certificate& cert) {
  if (!(cert.ic_value > 0))
    throw PreconditionError(
        "admissible lambda set requires a positive criterion");

  const Eigen::VectorXd f = face_vector(geom);
  require_face_vector(f);
  const double rho_sq = rho_squared(geom, f);
  if (!(rho_sq > 1e-14))
    throw PreconditionError("projected face vector vanishes (rho^2 = 0)");

  const double mu0 = eval_gauge(h, x0);
  const Constants k = constants(phi, h, x0, geom);

  Eigen::VectorXd noise = w;
  if (noise.size() == 0) noise = Eigen::VectorXd::Zero(phi.rows());
  if (noise.size() != phi.rows())
    throw InputError("noise vector has the wrong length");
  const double wip = f.dot(geom.gamma_perp * noise);
  const double norm_w = noise.norm();

  LambdaInterval out;

  // (i) mu > 0.
  const double ub_mu = wip + mu0 * rho_sq;

  // (ii) outside-correlation bound < mu, with the rigorous |mu0 - mu| form:
  //      |delta| c1 + delta < T - c2 |w|  where delta = (lambda - wip)/rho^2.
  const double margin = k.t - k.c2 * norm_w;
  double ub_support, lb_support;
  if (margin > 0) {
    ub_support = wip + rho_sq * margin / (1.0 + k.c1);
    lb_support = k.c1 > 1.0 ? wip - rho_sq * margin / (k.c1 - 1.0) : -kInf;
  } else if (k.c1 < 1.0) {
    ub_support = wip + rho_sq * margin / (1.0 - k.c1);
    lb_support = -kInf;
  } else {
    return out; // empty: the noise drowns the face margin
  }

  const double hi_cap = std::min(ub_mu, ub_support);
  const double lo_cap = std::max(0.0, lb_support);
  if (!(hi_cap > lo_cap) || !(hi_cap > 0)) return out;

  const Eigen::VectorXd gain = criterion_gain(geom);
  const Eigen::VectorXd w_corr =
      geom.phi_tilde.transpose() * (geom.gamma_perp * noise);
  const WitnessPredicate pred{gain, geom.ker_hi_basis, w_corr, wip, rho_sq};

  // Scan for one admissible lambda: linear sweep plus a geometric tail for
  // intervals hugging zero.
  double lambda_ok = -1.0;
  const double span = hi_cap - lo_cap;
  for (int j = 1; j <= 64 && lambda_ok < 0; ++j) {
    const double cand = lo_cap + span * j / 65.0;
    if (pred(cand)) lambda_ok = cand;
  }
  for (int j = 1; j <= 48 && lambda_ok < 0; ++j) {
    const double cand = hi_cap * std::pow(0.5, j);
    if (cand <= lo_cap) break;
    if (pred(cand)) lambda_ok = cand;
  }
  if (lambda_ok < 0) return out;

  // Lower endpoint.
  double lo;
  if (lo_cap > 0) {
    const double probe = lo_cap * (1.0 + 1e-12);
    lo = pred(probe) ? lo_cap : bisect_boundary(pred, probe, false, lambda_ok);
  } else {
    double down = lambda_ok;
    bool reached_zero = false;
    for (int it = 0; it < 60; ++it) {
      const double next = down / 8.0;
      if (next < 1e-14 * hi_cap) {
        reached_zero = true;
        break;
      }
      if (!pred(next)) break;
      down = next;
    }
    lo = reached_zero ? 0.0 : bisect_boundary(pred, down / 8.0, false, down);
  }

  // Upper endpoint.
  const double probe_hi = hi_cap * (1.0 - 1e-12);
  double hi;
  if (pred(probe_hi))
    hi = hi_cap;
  else
    hi = bisect_boundary(pred, lambda_ok, true, probe_hi);

  if (!(hi > lo)) return out;
  out.empty = false;
  out.lo = lo;
  out.hi = hi;
  return out;
}

DualCertificate noiseless_certificate(const Eigen::MatrixXd& phi,
                                      const HMatrix& h,
                                      const Eigen::VectorXd& x0,
                                      const SupportGeometry& geom,
                                      const Certificate& cert) {
  (void)x0;
  if (!(cert.ic_value > 0))
    throw PreconditionError(
        "dual certificate requires a positive criterion");
  const Eigen::VectorXd f = face_vector(geom);
  require_face_vector(f);
  const double rho_sq = rho_squared(geom, f);
  if (!(rho_sq > 1e-14))
    throw PreconditionError("projected face vector vanishes (rho^2 = 0)");

  DualCertificate out;
  out.eta = geom.gamma_perp * f / rho_sq;
  out.v = (cert.z_star + criterion_gain(geom)) / rho_sq;

  const Eigen::MatrixXd h_i = submatrix(h, geom.support);
  out.source_residual =
      (phi.transpose() * out.eta - h_i * out.v).cwiseAbs().maxCoeff();
  out.min_v = out.v.minCoeff();
  out.sum_v = out.v.sum();
  return out;
}

} // namespace polygauge
