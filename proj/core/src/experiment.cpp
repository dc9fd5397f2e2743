// SPDX-License-Identifier: Apache-2.0
#include "polygauge/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "polygauge/errors.hpp"
#include "polygauge/numlin.hpp"
#include "polygauge/qp.hpp"
#include "polygauge/rng.hpp"

namespace polygauge {

namespace {

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                Xoshiro256pp& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.gaussian();
  return m;
}

std::vector<Eigen::Index> distinct_positions(Eigen::Index count,
                                             Eigen::Index n,
                                             Xoshiro256pp& rng) {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(
        i + static_cast<Eigen::Index>(rng.below(
                static_cast<std::uint64_t>(n - i))));
    std::swap(all[static_cast<std::size_t>(i)], all[j]);
  }
  all.resize(static_cast<std::size_t>(count));
  return all;
}

// x0 sitting on a clean face of the gauge, with a real outside margin.
Eigen::VectorXd draw_face_point(const HDescriptor& desc, Eigen::Index n,
                                Eigen::Index sparsity, Xoshiro256pp& rng) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  switch (desc.kind) {
    case HDescriptor::Kind::l1: {
      Eigen::Index s = sparsity > 0 ? sparsity : std::max<Eigen::Index>(1, n / 3);
      s = std::min(s, n);
      for (const Eigen::Index pos : distinct_positions(s, n, rng)) {
        const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
        x[pos] = sign * rng.uniform(1.0, 2.0);
      }
      return x;
    }
    case HDescriptor::Kind::linf: {
      const auto peak = static_cast<Eigen::Index>(rng.below(
          static_cast<std::uint64_t>(n)));
      const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
      const double top = rng.uniform(1.5, 2.0);
      for (Eigen::Index i = 0; i < n; ++i)
        x[i] = rng.uniform(-0.8, 0.8) * top;
      x[peak] = sign * top;
      return x;
    }
    case HDescriptor::Kind::block: {
      for (const auto& block : desc.blocks) {
        const auto pick = static_cast<std::size_t>(rng.below(block.size()));
        const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
        const double top = rng.uniform(1.0, 2.0);
        for (const Eigen::Index i : block) x[i] = rng.uniform(-0.8, 0.8) * top;
        x[block[pick]] = sign * top;
      }
      return x;
    }
    case HDescriptor::Kind::analysis_l1: {
      const Eigen::MatrixXd& op = desc.analysis_op;
      if (op.rows() != op.cols())
        throw InputError(
            "random ensembles for analysis gauges need a square invertible "
            "operator");
      Eigen::Index s = sparsity > 0 ? sparsity
                                    : std::max<Eigen::Index>(1, op.rows() / 3);
      s = std::min(s, op.rows());
      Eigen::VectorXd coeff = Eigen::VectorXd::Zero(op.rows());
      for (const Eigen::Index pos : distinct_positions(s, op.rows(), rng)) {
        const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
        coeff[pos] = sign * rng.uniform(1.0, 2.0);
      }
      return op.fullPivLu().solve(coeff);
    }
    case HDescriptor::Kind::explicit_columns: {
      for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.gaussian();
      return x;
    }
  }
  throw InputError("unknown gauge descriptor");
}

} // namespace

DrawnInstance draw_instance(const EnsembleConfig& config, const HMatrix& h,
                            std::uint64_t seed) {
  if (config.q < 1) throw InputError("ensemble needs q >= 1");
  Xoshiro256pp rng(seed);
  DrawnInstance d;
  d.seed = seed;
  d.phi = gaussian_matrix(config.q, h.n(), rng);
  d.x0 = draw_face_point(config.gauge, h.n(), config.sparsity, rng);
  d.w = Eigen::VectorXd::Zero(config.q);
  if (config.sigma > 0)
    for (Eigen::Index i = 0; i < config.q; ++i)
      d.w[i] = config.sigma * rng.gaussian();
  return d;
}

CertifiedDraw next_certified(const EnsembleConfig& config, const HMatrix& h,
                             std::uint64_t base_seed, int& attempt) {
  for (; attempt < config.max_attempts; ) {
    const std::uint64_t seed = Xoshiro256pp::child_seed(
        base_seed, static_cast<std::uint64_t>(attempt));
    ++attempt;
    try {
      DrawnInstance d = draw_instance(config, h, seed);
      HSupport support = h_support(h, d.x0);
      SupportGeometry geom = support_geometry(d.phi, h, support);
      Certificate cert = ic(d.phi, h, geom);
      if (cert.verdict != Verdict::certified_positive) continue;

      LambdaInterval interval = lambda_range(d.phi, h, d.x0, d.w, geom, cert);
      // Shrink the noise (deterministically) if it drowns the face margin.
      for (int halvings = 0; interval.empty && halvings < 6; ++halvings) {
        d.w *= 0.5;
        interval = lambda_range(d.phi, h, d.x0, d.w, geom, cert);
      }
      if (interval.empty) continue;
      return CertifiedDraw{std::move(d), std::move(support), std::move(geom),
                           std::move(cert), interval};
    } catch (const Error&) {
      continue; // restricted injectivity or conditioning failed; next seed
    }
  }
  throw SolverFailure(
      "ensemble filter exhausted its attempt budget without a certified "
      "draw; loosen the configuration");
}

NegativeDraw next_negative(const EnsembleConfig& config, const HMatrix& h,
                           std::uint64_t base_seed, int& attempt,
                           double ic_threshold) {
  for (; attempt < config.max_attempts; ) {
    const std::uint64_t seed = Xoshiro256pp::child_seed(
        base_seed, static_cast<std::uint64_t>(attempt));
    ++attempt;
    try {
      DrawnInstance d = draw_instance(config, h, seed);
      HSupport support = h_support(h, d.x0);
      SupportGeometry geom = support_geometry(d.phi, h, support);
      Certificate cert = ic(d.phi, h, geom);
      if (!(cert.ic_value < ic_threshold)) continue;
      Constants consts = constants(d.phi, h, d.x0, geom);
      return NegativeDraw{std::move(d), std::move(support), std::move(geom),
                          std::move(cert), consts};
    } catch (const Error&) {
      continue;
    }
  }
  throw SolverFailure(
      "ensemble filter exhausted its attempt budget without a "
      "negative-criterion draw; loosen the configuration");
}

double pick_lambda(const LambdaInterval& interval) {
  if (interval.empty) throw PreconditionError("empty lambda interval");
  if (interval.lo > 0) return std::sqrt(interval.lo * interval.hi);
  return 0.5 * interval.hi;
}

NoiseScalingResult run_noise_scaling(const EnsembleConfig& config,
                                     double lambda_factor,
                                     const std::vector<double>& scalings,
                                     int instances, std::uint64_t seed) {
  if (!(lambda_factor > 0)) throw InputError("lambda_factor must be positive");
  if (scalings.empty()) throw InputError("scalings must be non-empty");
  if (!(config.sigma > 0))
    throw InputError("noise-scaling needs a positive sigma");
  const HMatrix h = build_gauge(config.gauge);

  NoiseScalingResult out;
  out.pass_fraction = 0.0;
  int attempt = 0;
  int passed = 0;
  for (int inst = 0; inst < instances; ++inst) {
    // Accept only draws where every scaled lambda stays admissible.
    CertifiedDraw cd = next_certified(config, h, seed, attempt);
    bool all_in = true;
    for (const double s : scalings) {
      const Eigen::VectorXd w_s = s * cd.draw.w;
      const double lambda_s = lambda_factor * w_s.norm();
      const LambdaInterval iv =
          lambda_range(cd.draw.phi, h, cd.draw.x0, w_s, cd.geom, cd.cert);
      if (!iv.contains(lambda_s)) {
        all_in = false;
        break;
      }
    }
    if (!all_in) {
      --inst; // retry with the next seed
      continue;
    }

    double lo_ratio = std::numeric_limits<double>::infinity();
    double hi_ratio = 0.0;
    for (const double s : scalings) {
      const Eigen::VectorXd w_s = s * cd.draw.w;
      const double lambda_s = lambda_factor * w_s.norm();
      const Eigen::VectorXd y_s = cd.draw.phi * cd.draw.x0 + w_s;
      const ClosedForm cf =
          closed_form_solution(cd.draw.phi, h, y_s, lambda_s, cd.geom);
      NoiseScalingRow row;
      row.instance = inst;
      row.seed = cd.draw.seed;
      row.scale = s;
      row.lambda = lambda_s;
      row.noise_norm = w_s.norm();
      row.error_l2 = (cf.x_hat - cd.draw.x0).norm();
      row.ratio = row.error_l2 / row.noise_norm;
      row.ic = cd.cert.ic_value;
      row.in_range = true;
      out.rows.push_back(row);
      lo_ratio = std::min(lo_ratio, row.ratio);
      hi_ratio = std::max(hi_ratio, row.ratio);
    }
    const double spread = lo_ratio > 0 ? (hi_ratio - lo_ratio) / lo_ratio : 0.0;
    out.max_spread = std::max(out.max_spread, spread);
    if (spread <= 0.10) ++passed;
  }
  out.pass_fraction =
      instances > 0 ? static_cast<double>(passed) / instances : 0.0;
  return out;
}

SupportRecoveryResult run_support_recovery(const EnsembleConfig& config,
                                           int instances, std::uint64_t seed) {
  const HMatrix h = build_gauge(config.gauge);
  SupportRecoveryResult out;
  int attempt = 0;
  int recovered = 0;
  for (int inst = 0; inst < instances; ++inst) {
    const CertifiedDraw cd = next_certified(config, h, seed, attempt);
    const double lambda = pick_lambda(cd.interval);
    const Eigen::VectorXd y = cd.draw.phi * cd.draw.x0 + cd.draw.w;

    const ClosedForm cf =
        closed_form_solution(cd.draw.phi, h, y, lambda, cd.geom);
    const SolveResult oracle = solve_p_lambda(cd.draw.phi, h, y, lambda);

    SupportRecoveryRow row;
    row.instance = inst;
    row.seed = cd.draw.seed;
    row.ic = cd.cert.ic_value;
    row.lambda = lambda;
    row.lambda_lo = cd.interval.lo;
    row.lambda_hi = cd.interval.hi;
    const HSupport recovered_face = h_support(h, cf.x_hat);
    row.support_match = cf.verdict == Verdict::certified_positive &&
                        recovered_face.same_indices(cd.support);
    row.oracle_rel_err = (cf.x_hat - oracle.x).norm() /
                         std::max(1.0, cf.x_hat.norm());
    out.rows.push_back(row);
    if (row.support_match) ++recovered;
    out.worst_oracle_err = std::max(out.worst_oracle_err, row.oracle_rel_err);
  }
  out.recovered_fraction =
      instances > 0 ? static_cast<double>(recovered) / instances : 0.0;
  return out;
}

NegativeIcResult run_negative_ic(const EnsembleConfig& config, int instances,
                                 double noise_to_lambda, double ic_threshold,
                                 std::uint64_t seed) {
  if (!(noise_to_lambda >= 0)) throw InputError("noise_to_lambda must be >= 0");
  if (!(ic_threshold < 0)) throw InputError("ic_threshold must be negative");
  const HMatrix h = build_gauge(config.gauge);
  NegativeIcResult out;
  int attempt = 0;
  int mismatched = 0;
  for (int inst = 0; inst < instances; ++inst) {
    const NegativeDraw nd =
        next_negative(config, h, seed, attempt, ic_threshold);
    // A weight at which a positive-criterion face would have been stable.
    const double lambda =
        0.1 * nd.consts.rho_sq * nd.consts.t / (1.0 + nd.consts.c1);

    Xoshiro256pp noise_rng(Xoshiro256pp::child_seed(nd.draw.seed, 1));
    Eigen::VectorXd w(config.q);
    for (Eigen::Index i = 0; i < config.q; ++i) w[i] = noise_rng.gaussian();
    const double target = noise_to_lambda * lambda;
    if (w.norm() > 0) w *= target / w.norm();

    const Eigen::VectorXd y = nd.draw.phi * nd.draw.x0 + w;
    const SolveResult oracle = solve_p_lambda(nd.draw.phi, h, y, lambda);

    NegativeIcRow row;
    row.instance = inst;
    row.seed = nd.draw.seed;
    row.ic = nd.cert.ic_value;
    row.lambda = lambda;
    row.noise_norm = w.norm();
    row.support_match =
        oracle.support.has_value() && oracle.support->same_indices(nd.support);
    out.rows.push_back(row);
    if (!row.support_match) ++mismatched;
  }
  out.mismatch_fraction =
      instances > 0 ? static_cast<double>(mismatched) / instances : 0.0;
  return out;
}

} // namespace polygauge
