// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "generators.hpp"
#include "polygauge/experiment.hpp"
#include "polygauge/qp.hpp"
#include "polygauge/rng.hpp"

using namespace polygauge;

namespace {

EnsembleConfig small_linf() {
  EnsembleConfig c;
  c.gauge.kind = HDescriptor::Kind::linf;
  c.gauge.n = 5;
  c.q = 6;
  c.sigma = 0.03;
  return c;
}

} // namespace

TEST_CASE("draws are reproducible from their recorded seed") {
  const EnsembleConfig config = small_linf();
  const HMatrix h = build_gauge(config.gauge);
  const DrawnInstance a = draw_instance(config, h, 424242);
  const DrawnInstance b = draw_instance(config, h, 424242);
  CHECK(a.phi == b.phi); // bitwise
  CHECK(a.x0 == b.x0);
  CHECK(a.w == b.w);
  const DrawnInstance c = draw_instance(config, h, 424243);
  CHECK(a.phi != c.phi);
}

TEST_CASE("certified draws satisfy their advertised filter") {
  const EnsembleConfig config = small_linf();
  const HMatrix h = build_gauge(config.gauge);
  int attempt = 0;
  for (int i = 0; i < 5; ++i) {
    const CertifiedDraw cd = next_certified(config, h, 7, attempt);
    CHECK(cd.cert.verdict == Verdict::certified_positive);
    REQUIRE_FALSE(cd.interval.empty);
    const double lambda = pick_lambda(cd.interval);
    CHECK(cd.interval.contains(lambda));
    CHECK(h_support(h, cd.draw.x0).same_indices(cd.support));
  }
}

TEST_CASE("support recovery rows regenerate from their seeds") {
  const EnsembleConfig config = small_linf();
  const SupportRecoveryResult r = run_support_recovery(config, 4, 99);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.recovered_fraction == 1.0);

  const HMatrix h = build_gauge(config.gauge);
  for (const SupportRecoveryRow& row : r.rows) {
    // The recorded seed alone rebuilds the instance and its criterion.
    const DrawnInstance d = draw_instance(config, h, row.seed);
    const SupportGeometry geom =
        support_geometry(d.phi, h, h_support(h, d.x0));
    const Certificate cert = ic(d.phi, h, geom);
    CHECK(cert.ic_value == doctest::Approx(row.ic).epsilon(1e-12));
  }
}

TEST_CASE("negative-criterion rows all mismatch at tiny noise") {
  EnsembleConfig config;
  config.gauge.kind = HDescriptor::Kind::l1;
  config.gauge.n = 6;
  config.q = 3;
  config.sparsity = 2;
  config.max_attempts = 8000;
  const NegativeIcResult r = run_negative_ic(config, 5, 1e-3, -1e-4, 31);
  REQUIRE(r.rows.size() == 5);
  CHECK(r.mismatch_fraction == 1.0);
  for (const NegativeIcRow& row : r.rows) {
    CHECK(row.ic < -1e-4);
    CHECK(row.noise_norm == doctest::Approx(1e-3 * row.lambda));
  }
}

TEST_CASE("noise scaling keeps the ratio flat") {
  EnsembleConfig config = small_linf();
  config.sigma = 0.02;
  const NoiseScalingResult r =
      run_noise_scaling(config, 2.0, {1.0, 0.5, 0.25, 0.125}, 3, 55);
  REQUIRE(r.rows.size() == 12);
  CHECK(r.pass_fraction == 1.0);
  CHECK(r.max_spread <= 0.10);
  for (const NoiseScalingRow& row : r.rows) CHECK(row.in_range);
}
