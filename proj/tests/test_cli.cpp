#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args, const fs::path& workdir) {
  const fs::path log = workdir / "stdout.txt";
  const std::string command = std::string(MATINAR_CLI_PATH) + " " + args +
                              " > " + log.string() + " 2>&1";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WEXITSTATUS(status);
  std::ifstream in(log);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  result.stdout_text = buffer.str();
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() /
                   ("matinar_cli_" + std::to_string(std::rand()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("simulate writes a deterministic series and params") {
  TempDir dir;
  const std::string out1 = (dir.path / "run1").string();
  const std::string out2 = (dir.path / "run2").string();
  const auto r1 = run_cli("simulate --scenario A --T 200 --seed 42 --out " + out1,
                          dir.path);
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.stdout_text.find("spectral radius") != std::string::npos);
  const auto r2 = run_cli("simulate --scenario A --T 200 --seed 42 --out " + out2,
                          dir.path);
  REQUIRE(r2.exit_code == 0);

  const std::string csv1 = slurp(fs::path(out1) / "series.csv");
  const std::string csv2 = slurp(fs::path(out2) / "series.csv");
  CHECK(csv1 == csv2);  // identical bytes, so identical digests
  // 200 observations x 4 cells + header.
  CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 801);

  const auto params = nlohmann::json::parse(slurp(fs::path(out1) / "params.json"));
  CHECK(params.at("m") == 2);
  CHECK(params.at("meta").at("seed") == 42);
  CHECK(params.at("meta").contains("config_hash"));
  CHECK(params.at("meta").contains("version"));

  // A different seed changes the bytes.
  const std::string out3 = (dir.path / "run3").string();
  run_cli("simulate --scenario A --T 200 --seed 43 --out " + out3, dir.path);
  CHECK(slurp(fs::path(out3) / "series.csv") != csv1);
}

TEST_CASE("simulate refuses non-stationary parameters with exit code 2") {
  TempDir dir;
  nlohmann::json params;
  params["m"] = 1;
  params["n"] = 1;
  params["p"] = 1;
  params["A"] = {{{1.0}}};
  params["B"] = {{{1.0}}};
  params["Lambda"] = {{1.0}};
  const fs::path file = dir.path / "explosive.json";
  std::ofstream(file) << params.dump();
  const auto result = run_cli("simulate --params " + file.string() +
                                  " --T 50 --seed 1 --out " +
                                  (dir.path / "out").string(),
                              dir.path);
  CHECK(result.exit_code == 2);
  const auto forced = run_cli("simulate --params " + file.string() +
                                  " --T 50 --seed 1 --force-nonstationary --out " +
                                  (dir.path / "forced").string(),
                              dir.path);
  CHECK(forced.exit_code == 0);
}

TEST_CASE("unknown scenario and missing inputs fail with exit code 2") {
  TempDir dir;
  CHECK(run_cli("simulate --scenario Q --T 10 --seed 1", dir.path).exit_code == 2);
  const auto unavailable =
      run_cli("simulate --scenario B --T 10 --seed 1", dir.path);
  CHECK(unavailable.exit_code == 2);
  CHECK(unavailable.stdout_text.find("unavailable") != std::string::npos);
  CHECK(run_cli("fit --data " + (dir.path / "nope.csv").string() + " --p 1",
                dir.path)
            .exit_code == 2);
}

TEST_CASE("fit select-order forecast diagnose pipeline") {
  TempDir dir;
  const std::string out = dir.path.string();
  REQUIRE(run_cli("simulate --scenario A --T 400 --seed 7 --out " + out,
                  dir.path)
              .exit_code == 0);
  const std::string data = (dir.path / "series.csv").string();

  SUBCASE("icls fit document") {
    REQUIRE(run_cli("fit --data " + data + " --p 1 --method icls --out " + out,
                    dir.path)
                .exit_code == 0);
    const auto fit = nlohmann::json::parse(slurp(dir.path / "fit.json"));
    CHECK(fit.at("method") == "icls");
    CHECK(fit.at("converged").get<bool>());
    const auto trace = fit.at("objective_trace").get<std::vector<double>>();
    for (std::size_t s = 1; s < trace.size(); ++s) {
      CHECK(trace[s] <= trace[s - 1] * (1.0 + 1e-12) + 1e-9);
    }
    // The estimated A recovers the truth within a loose Monte-Carlo band.
    const double a11 = fit.at("A")[0][0][0].get<double>();
    CHECK(a11 == doctest::Approx(0.2 / std::sqrt(0.4)).epsilon(0.45));
  }

  SUBCASE("select-order output shape") {
    REQUIRE(run_cli("select-order --data " + data + " --p-bar 3 --out " + out,
                    dir.path)
                .exit_code == 0);
    const auto order = nlohmann::json::parse(slurp(dir.path / "order.json"));
    CHECK(order.at("p_hat") == 1);
    const std::string csv = slurp(dir.path / "order.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + p_bar
    CHECK(csv.rfind("p_tilde,ic1", 0) == 0);
  }

  SUBCASE("forecast with a train test split") {
    REQUIRE(run_cli("fit --data " + data +
                        " --p 1 --method icls --train-T 360 --out " + out,
                    dir.path)
                .exit_code == 0);
    REQUIRE(run_cli("forecast --params " + (dir.path / "fit.json").string() +
                        " --data " + data +
                        " --origin 360 --horizon 40 --out " + out,
                    dir.path)
                .exit_code == 0);
    const auto fc = nlohmann::json::parse(slurp(dir.path / "forecast.json"));
    CHECK(fc.at("forecasts").size() == 40);
    CHECK(fc.at("cmpe").size() == 40);
    CHECK(fc.at("mspe").get<double>() ==
          doctest::Approx(fc.at("cmpe")[39].get<double>()).epsilon(1e-12));
    const std::string cmpe_csv = slurp(dir.path / "cmpe.csv");
    CHECK(std::count(cmpe_csv.begin(), cmpe_csv.end(), '\n') == 41);
    // Horizon beyond the held-out data is a validation error.
    CHECK(run_cli("forecast --params " + (dir.path / "fit.json").string() +
                      " --data " + data + " --origin 360 --horizon 50 --out " +
                      out,
                  dir.path)
              .exit_code == 2);
  }

  SUBCASE("diagnose emits a portmanteau table") {
    REQUIRE(run_cli("fit --data " + data + " --p 1 --method icls --out " + out,
                    dir.path)
                .exit_code == 0);
    REQUIRE(run_cli("diagnose --params " + (dir.path / "fit.json").string() +
                        " --data " + data + " --out " + out,
                    dir.path)
                .exit_code == 0);
    const auto diag = nlohmann::json::parse(slurp(dir.path / "diagnostics.json"));
    CHECK(diag.at("portmanteau").size() == 24);
    CHECK(diag.at("statistic") == "hosking-portmanteau");
    for (const auto& row : diag.at("portmanteau")) {
      const double p_value = row.at("p_value").get<double>();
      CHECK(p_value >= 0.0);
      CHECK(p_value <= 1.0);
    }
  }

  SUBCASE("acf table") {
    REQUIRE(run_cli("acf --data " + data + " --max-lag 4 --out " + out,
                    dir.path)
                .exit_code == 0);
    const std::string csv = slurp(dir.path / "crossacf.csv");
    // header + 2 flavors x 5 lags x 16 entries
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 161);
  }

  SUBCASE("malformed csv names the line") {
    const fs::path bad = dir.path / "bad.csv";
    std::ofstream(bad) << "t,row,col,value\n1,1,1,3\n1,1,2,x\n";
    const auto result =
        run_cli("fit --data " + bad.string() + " --p 1", dir.path);
    CHECK(result.exit_code == 2);
    CHECK(result.stdout_text.find("line 3") != std::string::npos);
  }
}

TEST_CASE("replicate smoke run is deterministic") {
  TempDir dir;
  const std::string out1 = (dir.path / "r1").string();
  const std::string out2 = (dir.path / "r2").string();
  const std::string flags =
      "replicate --mode estimate --scenario A --T 200 --reps 4 --method icls "
      "--seed 11 --jobs 2 --out ";
  REQUIRE(run_cli(flags + out1, dir.path).exit_code == 0);
  REQUIRE(run_cli(flags + out2, dir.path).exit_code == 0);
  CHECK(slurp(fs::path(out1) / "report.json") ==
        slurp(fs::path(out2) / "report.json"));
  const auto report = nlohmann::json::parse(slurp(fs::path(out1) / "report.json"));
  CHECK(report.at("estimation")[0].at("replications") == 4);
  CHECK(report.at("meta").at("seed") == 11);
  const std::string table = slurp(fs::path(out1) / "report.txt");
  CHECK(table.find("Bias") != std::string::npos);
}

TEST_CASE("replicate order mode emits frequency rows") {
  TempDir dir;
  const std::string out = dir.path.string();
  REQUIRE(run_cli("replicate --mode order --true-p 1 --T 150 --reps 3 "
                  "--p-bar 2 --seed 13 --jobs 2 --out " +
                      out,
                  dir.path)
              .exit_code == 0);
  const auto report = nlohmann::json::parse(slurp(dir.path / "report.json"));
  const auto& row = report.at("order").at("rows")[0];
  const double total = row.at("freq_correct").get<double>() +
                       row.at("freq_over").get<double>() +
                       row.at("freq_under").get<double>();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}
