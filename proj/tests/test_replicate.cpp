#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>

#include "matinar/replicate.hpp"
#include "matinar/scenario.hpp"

using namespace matinar;

TEST_CASE("scenario registry") {
  const ModelParams params = scenario_a();
  CHECK(params.m == 2);
  CHECK(params.p == 1);
  CHECK(params.A[0].norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(params.A[0](0, 0) == doctest::Approx(0.2 / std::sqrt(0.4)).epsilon(1e-12));
  CHECK(params.A[0](0, 1) == doctest::Approx(0.4 / std::sqrt(0.4)).epsilon(1e-12));
  CHECK(params.B[0](0, 0) == 0.5);
  CHECK(params.B[0](1, 0) == 0.3);
  CHECK((params.Lambda.array() == 1.0).all());
  CHECK_NOTHROW(scenario_by_name("A"));
  CHECK_THROWS_WITH_AS(scenario_by_name("B"), doctest::Contains("unavailable"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(scenario_by_name("E"), doctest::Contains("unavailable"),
                       std::invalid_argument);
  CHECK_THROWS_AS(scenario_by_name("nope"), std::invalid_argument);
}

TEST_CASE("random scenarios are stationary with normalized row factors") {
  RngStream rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + static_cast<int>(rng.next_uniform() * 3);
    const ModelParams params =
        random_scenario(2, 2, p, Matrix::Ones(2, 2), rng);
    CHECK(check_stationary(params).stationary);
    for (int l = 0; l < p; ++l) {
      CHECK(params.A[l].norm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(params.A[l].minCoeff() >= 0.0);
      CHECK(params.B[l].minCoeff() >= 0.0);
      CHECK(params.B[l].maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("parallel_for_index covers every index exactly once") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for_index(hits.size(), 4,
                     [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);
  // Exceptions propagate.
  CHECK_THROWS_AS(
      parallel_for_index(8, 3,
                         [](std::size_t i) {
                           if (i == 5) throw std::runtime_error("boom");
                         }),
      std::runtime_error);
}

TEST_CASE("estimation study aggregates deterministically across job counts") {
  EstimationStudyConfig config;
  config.truth = scenario_a();
  config.T_grid = {120};
  config.replications = 6;
  config.method = FitMethod::icls;
  config.seed = 303;
  config.burn_in = 100;
  config.jobs = 1;
  const EstimationReport serial = run_estimation_study(config);
  config.jobs = 3;
  const EstimationReport parallel = run_estimation_study(config);
  REQUIRE(serial.rows.size() == 1);
  CHECK((serial.rows[0].bias - parallel.rows[0].bias).norm() == 0.0);
  CHECK((serial.rows[0].sd - parallel.rows[0].sd).norm() == 0.0);
  CHECK((serial.rows[0].mean_se - parallel.rows[0].mean_se).norm() == 0.0);
  CHECK(serial.labels.size() == 12);
  // Estimates center near the truth even in a smoke-sized study.
  CHECK(serial.rows[0].bias.cwiseAbs().maxCoeff() < 0.5);
}

TEST_CASE("proj estimation study carries bootstrap standard errors") {
  EstimationStudyConfig config;
  config.truth = scenario_a();
  config.T_grid = {150};
  config.replications = 3;
  config.method = FitMethod::proj;
  config.seed = 404;
  config.burn_in = 100;
  config.bootstrap_reps = 20;
  config.jobs = 2;
  const EstimationReport report = run_estimation_study(config);
  // Every parameter (A, B, Lambda blocks) gets a positive standard error.
  CHECK(report.rows[0].mean_se.minCoeff() > 0.0);
}

TEST_CASE("order study shares truths across sample sizes") {
  OrderStudyConfig config;
  config.true_p = 1;
  config.T_grid = {120, 240};
  config.replications = 4;
  config.p_bar = 2;
  config.seed = 505;
  config.burn_in = 100;
  config.jobs = 2;
  const OrderStudyReport report = run_order_study(config);
  REQUIRE(report.rows.size() == 2);
  for (const auto& row : report.rows) {
    CHECK(row.freq_correct + row.freq_over + row.freq_under ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  const OrderStudyReport again = run_order_study(config);
  CHECK(again.rows[0].freq_correct == report.rows[0].freq_correct);
  CHECK(again.rows[1].freq_correct == report.rows[1].freq_correct);
}
