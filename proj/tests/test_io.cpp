#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "matinar/io.hpp"
#include "matinar/scenario.hpp"
#include "matinar/version.hpp"

using namespace matinar;

TEST_CASE("series csv round trip is bit identical") {
  const CountSeries series = simulate(scenario_a(), 40, 100, 81);
  const std::string text = series_to_csv(series);
  const CountSeries parsed = series_from_csv(text);
  REQUIRE(parsed.size() == series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    CHECK((parsed[t] - series[t]).cwiseAbs().maxCoeff() == 0);
  }
  CHECK(series_to_csv(parsed) == text);
}

TEST_CASE("series csv validation errors carry locations") {
  SUBCASE("bad header") {
    CHECK_THROWS_WITH_AS(series_from_csv("a,b,c\n"),
                         doctest::Contains("line 1"), std::invalid_argument);
  }
  SUBCASE("non-integer field") {
    const std::string text = "t,row,col,value\n1,1,1,2.5\n";
    CHECK_THROWS_WITH_AS(series_from_csv(text), doctest::Contains("line 2"),
                         std::invalid_argument);
  }
  SUBCASE("missing cell names the position") {
    std::string text = "t,row,col,value\n";
    text += "1,1,1,3\n1,1,2,4\n1,2,1,5\n1,2,2,6\n";
    text += "2,1,1,1\n2,1,2,2\n2,2,1,3\n";  // (2,2) missing at t=2
    CHECK_THROWS_WITH_AS(series_from_csv(text),
                         doctest::Contains("t=2 row=2 col=2"),
                         std::invalid_argument);
  }
  SUBCASE("duplicate cell") {
    std::string text = "t,row,col,value\n1,1,1,3\n1,1,1,4\n";
    CHECK_THROWS_WITH_AS(series_from_csv(text), doctest::Contains("duplicate"),
                         std::invalid_argument);
  }
  SUBCASE("negative value") {
    CHECK_THROWS_WITH_AS(series_from_csv("t,row,col,value\n1,1,1,-2\n"),
                         doctest::Contains("nonnegative"),
                         std::invalid_argument);
  }
  SUBCASE("time gap") {
    std::string text = "t,row,col,value\n1,1,1,3\n3,1,1,4\n";
    CHECK_THROWS_WITH_AS(series_from_csv(text), doctest::Contains("1..T"),
                         std::invalid_argument);
  }
}

TEST_CASE("params json round trip") {
  const ModelParams params = scenario_a();
  const nlohmann::json j = params_to_json(params);
  const ModelParams back = params_from_json(j);
  CHECK(back.m == params.m);
  CHECK(back.n == params.n);
  CHECK(back.p == params.p);
  CHECK((back.A[0] - params.A[0]).norm() == 0.0);
  CHECK((back.B[0] - params.B[0]).norm() == 0.0);
  CHECK((back.Lambda - params.Lambda).norm() == 0.0);
}

TEST_CASE("params json rejects malformed documents") {
  nlohmann::json j = params_to_json(scenario_a());
  j.erase("Lambda");
  CHECK_THROWS_WITH_AS(params_from_json(j), doctest::Contains("Lambda"),
                       std::invalid_argument);
  nlohmann::json wrong = params_to_json(scenario_a());
  wrong["A"][0].erase(0);
  CHECK_THROWS_AS(params_from_json(wrong), std::invalid_argument);
}

TEST_CASE("fit documents carry both estimates and metadata") {
  const CountSeries series = simulate(scenario_a(), 300, 200, 82);
  const ProjFit pfit = proj_fit(series, 1);
  const nlohmann::json pj = proj_fit_to_json(pfit);
  CHECK(pj.at("method") == "proj");
  CHECK(pj.at("A").size() == 1);
  CHECK(pj.contains("condition_number"));
  CHECK(pj.at("residuals").contains("mean_norm"));
  // A fit document is itself a valid params document.
  const ModelParams reread = params_from_json(pj);
  CHECK((reread.A[0] - pfit.A[0]).norm() == 0.0);

  const IclsFit ifit = icls_fit(series, 1, pfit);
  const IclsSe se = icls_standard_errors(ifit, series);
  const nlohmann::json ij = icls_fit_to_json(ifit, se);
  CHECK(ij.at("method") == "icls");
  CHECK(ij.at("converged").get<bool>());
  CHECK(ij.at("objective_trace").size() ==
        static_cast<std::size_t>(ifit.sweeps) + 1);
  std::vector<double> trace = ij.at("objective_trace").get<std::vector<double>>();
  for (std::size_t s = 1; s < trace.size(); ++s) {
    CHECK(trace[s] <= trace[s - 1] * (1.0 + 1e-12) + 1e-9);
  }
}

TEST_CASE("report formatting") {
  EstimationReport report;
  report.method = FitMethod::icls;
  report.replications = 10;
  report.labels = parameter_labels(2, 2, 1);
  EstimationRow row;
  row.T = 200;
  row.bias = Vector::Constant(12, 0.01);
  row.sd = Vector::Constant(12, 0.05);
  row.mean_se = Vector::Constant(12, 0.04);
  report.rows.push_back(row);
  const std::string table = format_estimation_table(report);
  CHECK(table.find("a11") != std::string::npos);
  CHECK(table.find("lambda22") != std::string::npos);
  CHECK(table.find("Bias") != std::string::npos);
  const nlohmann::json j = estimation_report_to_json(report);
  CHECK(j.at("rows")[0].at("T") == 200);
}

TEST_CASE("parameter labels follow column-major order with lag suffixes") {
  const auto labels = parameter_labels(2, 2, 2);
  REQUIRE(labels.size() == 20);
  CHECK(labels[0] == "a11_l1");
  CHECK(labels[1] == "a21_l1");
  CHECK(labels[2] == "a12_l1");
  CHECK(labels[8] == "b11_l1");
  CHECK(labels[16] == "lambda11");
  const auto flat = parameter_labels(2, 2, 1);
  CHECK(flat[0] == "a11");
  CHECK(flat[4] == "b11");
}

TEST_CASE("config hash is stable") {
  CHECK(fnv1a_hex("abc") == fnv1a_hex("abc"));
  CHECK(fnv1a_hex("abc") != fnv1a_hex("abd"));
  CHECK(fnv1a_hex("").size() == 16);
}

TEST_CASE("file round trip through the filesystem") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "matinar_io_test";
  fs::create_directories(dir);
  const CountSeries series = simulate(scenario_a(), 20, 50, 83);
  const std::string path = (dir / "series.csv").string();
  write_series_csv(series, path);
  const CountSeries back = read_series_csv(path);
  CHECK(back.size() == series.size());
  CHECK_THROWS_AS(read_series_csv((dir / "missing.csv").string()),
                  std::invalid_argument);
  fs::remove_all(dir);
}
