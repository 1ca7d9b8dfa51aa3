#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "partisan/common/error.hpp"
#include "partisan/common/rng.hpp"
#include "partisan/pipeline/synth.hpp"
#include "partisan/spatial/ols.hpp"
#include "partisan/spatial/sar.hpp"
#include "partisan/spatial/weights.hpp"

using namespace partisan;

TEST_CASE("haversine distances match known geometry") {
  // One degree of latitude along a meridian is R * pi / 180.
  CHECK(spatial::haversine_km(0.0, 0.0, 1.0, 0.0) ==
        doctest::Approx(6371.0088 * M_PI / 180.0).epsilon(1e-12));
  // Quarter circumference: pole to equator.
  CHECK(spatial::haversine_km(90.0, 0.0, 0.0, 17.0) ==
        doctest::Approx(6371.0088 * M_PI / 2.0).epsilon(1e-12));
  CHECK(spatial::haversine_km(33.0, -97.0, 33.0, -97.0) == doctest::Approx(0.0));
  // Symmetry.
  CHECK(spatial::haversine_km(10.0, 20.0, -30.0, 40.0) ==
        doctest::Approx(spatial::haversine_km(-30.0, 40.0, 10.0, 20.0)));
}

TEST_CASE("knn weights pick nearest neighbors with 1/k weights") {
  // Counties on a line of longitude: neighbors are obvious.
  core::CountyTable counties({
      {"01001", 0.0, 0.0, 100, 1},
      {"01003", 1.0, 0.0, 100, 1},
      {"01005", 2.0, 0.0, 100, 1},
      {"01007", 5.0, 0.0, 100, 1},
  });
  auto w = spatial::knn_weights(counties, 2);
  CHECK(w.k == 2);
  auto d = w.to_dense();
  for (int i = 0; i < 4; ++i) {
    CHECK(d(i, i) == 0.0);
    CHECK(d.row(i).sum() == doctest::Approx(1.0));
  }
  CHECK(d(0, 1) == doctest::Approx(0.5));
  CHECK(d(0, 2) == doctest::Approx(0.5));
  CHECK(d(3, 2) == doctest::Approx(0.5));
  CHECK(d(3, 1) == doctest::Approx(0.5));
  CHECK(d(3, 0) == 0.0);

  CHECK_THROWS_AS(spatial::knn_weights(counties, 4), Error);
  CHECK_THROWS_AS(spatial::knn_weights(counties, 0), Error);
}

TEST_CASE("knn distance ties break toward ascending fips") {
  // Two candidates at exactly the same distance from 01001.
  core::CountyTable counties({
      {"01001", 0.0, 0.0, 100, 1},
      {"01003", 0.0, 1.0, 100, 1},
      {"01005", 0.0, -1.0, 100, 1},
      {"01007", 0.0, 3.0, 100, 1},
  });
  auto w = spatial::knn_weights(counties, 1);
  auto d = w.to_dense();
  CHECK(d(0, 1) == doctest::Approx(1.0));  // 01003 beats 01005 on fips
  CHECK(d(0, 2) == 0.0);

  std::vector<std::string> warnings;
  core::CountyTable dup({
      {"01001", 0.0, 0.0, 100, 1},
      {"01003", 0.0, 0.0, 100, 1},
      {"01005", 1.0, 1.0, 100, 1},
  });
  spatial::knn_weights(dup, 1, [&](const std::string& m) { warnings.push_back(m); });
  CHECK(!warnings.empty());
}

TEST_CASE("ols matches the hand-computed oracle") {
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 5;
  Eigen::MatrixXd X(4, 1);
  X << 0, 1, 2, 3;
  auto fit = spatial::fit_ols(y, X, {"x"});
  REQUIRE(fit.coefficients.size() == 2);
  CHECK(fit.coefficients[0].name == "intercept");
  CHECK(fit.coefficients[0].estimate == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(fit.coefficients[1].estimate == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(0.9657142857142857).epsilon(1e-12));
  CHECK(fit.sigma2 == doctest::Approx(0.075).epsilon(1e-12));
  CHECK(fit.coefficients[1].se == doctest::Approx(0.24494897427831788).epsilon(1e-11));
  CHECK(fit.coefficients[1].t == doctest::Approx(5.307227776030218).epsilon(1e-11));
  CHECK(fit.coefficients[1].p == doctest::Approx(0.11856328073090003).epsilon(1e-10));
  CHECK(fit.coefficients[0].se == doctest::Approx(0.4582575694955841).epsilon(1e-11));
  CHECK(fit.coefficients[0].t == doctest::Approx(1.7457431218879387).epsilon(1e-11));
  CHECK(fit.coefficients[0].p == doctest::Approx(0.33116698639262443).epsilon(1e-10));
  CHECK(fit.loglik == doctest::Approx(-0.4952198019270382).epsilon(1e-11));
  CHECK(fit.aic == doctest::Approx(6.990439603854076).epsilon(1e-11));
  CHECK(fit.n == 4);
  CHECK(fit.k_params == 3);
  CHECK(fit.aic == doctest::Approx(2.0 * fit.k_params - 2.0 * fit.loglik).epsilon(1e-13));
}

TEST_CASE("ols rejects degenerate designs") {
  Eigen::VectorXd y(6);
  y << 1, 2, 3, 5, 4, 7;
  Eigen::MatrixXd dup(6, 2);
  dup.col(0) << 1, 2, 3, 4, 5, 6;
  dup.col(1) = 2.0 * dup.col(0);
  try {
    spatial::fit_ols(y, dup, {"a", "b"});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularDesign);
  }
  Eigen::VectorXd y3(3);
  y3 << 1, 2, 3;
  Eigen::MatrixXd X(3, 2);
  X << 1, 2, 2, 1, 3, 5;
  CHECK_THROWS_AS(spatial::fit_ols(y3, X, {"a", "b"}), Error);  // n <= k_params
  Eigen::VectorXd y2(2);
  y2 << 1, 2;
  CHECK_THROWS_AS(spatial::fit_ols(y2, X, {"a", "b"}), Error);  // shape mismatch
}

TEST_CASE("ols null p-values are uniform") {
  // Under the null (no effect), slope p-values are U(0,1); check with a
  // Kolmogorov-Smirnov bound at alpha ~ 0.01.
  Rng rng(314);
  const int sims = 200;
  std::vector<double> pvals;
  for (int s = 0; s < sims; ++s) {
    Eigen::VectorXd y(30);
    Eigen::MatrixXd X(30, 1);
    for (int i = 0; i < 30; ++i) {
      y(i) = rng.normal();
      X(i, 0) = rng.normal();
    }
    pvals.push_back(spatial::fit_ols(y, X, {"x"}).coefficients[1].p);
  }
  std::sort(pvals.begin(), pvals.end());
  double dmax = 0.0;
  for (int i = 0; i < sims; ++i) {
    double u = pvals[i];
    dmax = std::max(dmax, std::abs(u - (i + 1.0) / sims));
    dmax = std::max(dmax, std::abs(u - static_cast<double>(i) / sims));
  }
  CHECK(dmax < 1.63 / std::sqrt(static_cast<double>(sims)));
}

TEST_CASE("log determinant term vanishes at rho zero and matches dense") {
  pipeline::SyntheticSpec spec;
  spec.side = 7;
  spec.seed = 3;
  auto sample = pipeline::generate_sar(spec);
  CHECK(spatial::log_det_profile(sample.w, 0.0) == doctest::Approx(0.0));
  double rho = 0.3;
  Eigen::MatrixXd a =
      Eigen::MatrixXd::Identity(49, 49) - rho * sample.w.to_dense();
  double expected = std::log(a.determinant());
  CHECK(spatial::log_det_profile(sample.w, rho) ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("spatial lag fit recovers the generating process") {
  pipeline::SyntheticSpec spec;
  spec.side = 15;
  spec.rho = 0.5;
  spec.beta = {1.2};
  spec.sigma = 0.2;
  spec.seed = 11;
  auto sample = pipeline::generate_sar(spec);
  auto fit = spatial::fit_spatial_lag(sample.y, sample.x, {"x"}, sample.w);
  CHECK(fit.rho == doctest::Approx(0.5).epsilon(0.2));
  CHECK(fit.coefficients[1].estimate == doctest::Approx(1.2).epsilon(0.1));
  CHECK(fit.n == 225);
  CHECK(fit.k_params == 4);  // intercept, slope, rho, sigma2
  CHECK(fit.aic == doctest::Approx(2.0 * fit.k_params - 2.0 * fit.loglik).epsilon(1e-10));
  CHECK(fit.rho_se > 0.0);
  CHECK(fit.rho_p < 0.001);
  CHECK(fit.r2 > 0.5);
  CHECK(fit.r2 <= 1.0);

  // Against OLS on the same data the lag model fits no worse in likelihood.
  auto ols = spatial::fit_ols(sample.y, sample.x, {"x"});
  CHECK(fit.loglik >= ols.loglik - 1e-9);
}

TEST_CASE("spatial lag coverage holds across seeds") {
  // Pipeline invariant: the +-2 SE interval around rho-hat covers the true
  // rho in at least 42 of 50 seeded replications.
  pipeline::SyntheticSpec spec;
  spec.side = 10;
  spec.rho = 0.4;
  spec.sigma = 0.3;
  int covered = 0;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    spec.seed = seed;
    auto sample = pipeline::generate_sar(spec);
    auto fit = spatial::fit_spatial_lag(sample.y, sample.x, {"x"}, sample.w);
    if (std::abs(fit.rho - spec.rho) <= 2.0 * fit.rho_se) ++covered;
  }
  CHECK(covered >= 42);
}
