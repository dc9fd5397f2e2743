// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "polygauge/builders.hpp"
#include "polygauge/errors.hpp"
#include "polygauge/gauge.hpp"
#include "polygauge/rng.hpp"

using namespace polygauge;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd random_vector(Eigen::Index n, Xoshiro256pp& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

// Draw from the canonical simplex by normalized exponentials.
Eigen::VectorXd random_simplex(Eigen::Index k, Xoshiro256pp& rng) {
  Eigen::VectorXd v(k);
  for (Eigen::Index i = 0; i < k; ++i) v[i] = -std::log(1.0 - rng.uniform());
  return v / v.sum();
}

} // namespace

TEST_CASE("gauge evaluation on the named norms") {
  const HMatrix hinf = build_linf(2);
  CHECK(eval_gauge(hinf, vec2(3, -5)) == doctest::Approx(5.0).epsilon(1e-15));

  const HMatrix h1 = build_l1(2);
  CHECK(eval_gauge(h1, vec2(1, -2)) == doctest::Approx(3.0).epsilon(1e-15));

  CHECK(eval_gauge(hinf, Eigen::VectorXd::Zero(2)) == 0.0);
  CHECK(eval_gauge(h1, Eigen::VectorXd::Zero(2)) == 0.0);
}

TEST_CASE("gauge evaluation rejects bad input") {
  const HMatrix hinf = build_linf(2);
  CHECK_THROWS_AS(eval_gauge(hinf, Eigen::VectorXd::Zero(3)), InputError);
  Eigen::VectorXd bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eval_gauge(hinf, bad), InputError);
}

TEST_CASE("face detection on the named norms") {
  const HMatrix hinf = build_linf(2); // columns e1, e2, -e1, -e2
  CHECK(h_support(hinf, vec2(2, 1), 0.0).indices ==
        std::vector<Eigen::Index>{0});
  CHECK(h_support(hinf, vec2(1, 1), 0.0).indices ==
        std::vector<Eigen::Index>{0, 1});
  CHECK(h_support(hinf, vec2(-2, 1), 0.0).indices ==
        std::vector<Eigen::Index>{2});

  const HMatrix h1 = build_l1(2); // columns (1,1),(1,-1),(-1,1),(-1,-1)
  CHECK(h_support(h1, vec2(3, 0), 0.0).indices ==
        std::vector<Eigen::Index>{0, 1});

  CHECK_THROWS_AS(h_support(hinf, Eigen::VectorXd::Zero(2)),
                  UndefinedSupportError);
}

TEST_CASE("subdifferential descriptor and membership") {
  const HMatrix hinf = build_linf(2);
  const SubdiffDescriptor at_peak = subdifferential(hinf, vec2(2, 1));
  REQUIRE(at_peak.index_set.indices == std::vector<Eigen::Index>{0});
  CHECK(at_peak.h_sub.col(0).isApprox(vec2(1, 0)));

  const HMatrix h1 = build_l1(2);
  const SubdiffDescriptor at_spike = subdifferential(h1, vec2(3, 0));
  REQUIRE(at_spike.index_set.size() == 2);

  // (1, 0.3) = H_I v with v = (0.65, 0.35) on the simplex.
  CHECK(in_subdifferential(h1, vec2(3, 0), vec2(1.0, 0.3)));
  CHECK(in_subdifferential(h1, vec2(3, 0), vec2(1.0, 1.0)));
  CHECK(in_subdifferential(h1, vec2(3, 0), vec2(1.0, -1.0)));
  CHECK_FALSE(in_subdifferential(h1, vec2(3, 0), vec2(1.0, 1.2)));
  CHECK_FALSE(in_subdifferential(h1, vec2(3, 0), vec2(0.5, 0.0)));
}

TEST_CASE("validity decisions with witnesses") {
  CHECK(is_valid_gauge(build_linf(2)).valid);
  CHECK(is_valid_gauge(build_l1(3)).valid);

  // Columns e1, -e1 in R^2: the gauge vanishes along e2.
  Eigen::MatrixXd cols(2, 2);
  cols << 1, -1, 0, 0;
  const HMatrix flat = make_hmatrix(cols);
  const GaugeValidity v = is_valid_gauge(flat);
  REQUIRE_FALSE(v.valid);
  REQUIRE(v.witness.size() == 2);
  CHECK(eval_gauge(flat, v.witness) <= 1e-10);
  CHECK(v.witness.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK(std::abs(v.witness[1]) == doctest::Approx(1.0)); // along e2

  // A single one-sided column cannot wrap the origin.
  Eigen::MatrixXd one(1, 1);
  one << 1;
  const GaugeValidity v1 = is_valid_gauge(make_hmatrix(one));
  REQUIRE_FALSE(v1.valid);
  CHECK(eval_gauge(make_hmatrix(one), v1.witness) <= 1e-10);
}

TEST_CASE("gauge axioms hold on random valid gauges") {
  Xoshiro256pp rng(314159u);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(3));
    HMatrix h;
    switch (rng.below(3)) {
      case 0: h = build_l1(n); break;
      case 1: h = build_linf(n); break;
      default: {
        // Random columns plus +-axes to keep the hull around 0.
        Eigen::MatrixXd cols(n, 2 * n + 4);
        for (Eigen::Index c = 0; c < 4; ++c)
          cols.col(c) = random_vector(n, rng);
        cols.rightCols(2 * n) << Eigen::MatrixXd::Identity(n, n),
            -Eigen::MatrixXd::Identity(n, n);
        h = make_hmatrix(cols);
        break;
      }
    }
    REQUIRE(is_valid_gauge(h).valid);

    const Eigen::VectorXd x = random_vector(n, rng);
    const Eigen::VectorXd y = random_vector(n, rng);
    const double alpha = 0.1 + 3.0 * rng.uniform();

    const double jx = eval_gauge(h, x);
    CHECK(std::abs(eval_gauge(h, alpha * x) - alpha * jx) <=
          1e-12 * (1.0 + alpha * std::abs(jx)));
    CHECK(eval_gauge(h, x + y) <= jx + eval_gauge(h, y) + 1e-12);

    // Face invariance under positive scaling.
    CHECK(h_support(h, x).indices == h_support(h, alpha * x).indices);
  }
}

TEST_CASE("subgradient inequality over sampled simplex points") {
  Xoshiro256pp rng(271828u);
  for (int checked = 0; checked < 1000; ++checked) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(3));
    const HMatrix h = rng.below(2) == 0 ? build_l1(n) : build_linf(n);
    const Eigen::VectorXd x = random_vector(n, rng);
    const Eigen::VectorXd y = random_vector(n, rng);
    const SubdiffDescriptor sd = subdifferential(h, x);
    const Eigen::VectorXd v = random_simplex(sd.index_set.size(), rng);
    const Eigen::VectorXd g = sd.h_sub * v;
    // J(y) >= J(x) + <g, y - x> up to 1e-10.
    CHECK(eval_gauge(h, y) >= eval_gauge(h, x) + g.dot(y - x) - 1e-10);
  }
}

TEST_CASE("named-norm evaluations match the direct formulas") {
  Xoshiro256pp rng(42u);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(8));
    const Eigen::VectorXd x = random_vector(n, rng);
    CHECK(eval_gauge(build_linf(n), x) == oracles::linf_norm(x));
    CHECK(std::abs(eval_gauge(build_l1(n), x) - oracles::l1_norm(x)) <=
          1e-12 * (1.0 + oracles::l1_norm(x)));
  }
}
