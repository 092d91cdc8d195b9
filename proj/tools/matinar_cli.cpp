#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "matinar/forecast.hpp"
#include "matinar/io.hpp"
#include "matinar/order.hpp"
#include "matinar/replicate.hpp"
#include "matinar/scenario.hpp"
#include "matinar/version.hpp"

namespace {

using namespace matinar;
namespace fs = std::filesystem;

int default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

nlohmann::json run_meta(const nlohmann::json& config, std::uint64_t seed,
                        bool has_seed) {
  nlohmann::json meta;
  meta["version"] = std::string(kVersion);
  meta["config_hash"] = fnv1a_hex(config.dump());
  if (has_seed) meta["seed"] = seed;
  return meta;
}

ModelParams load_params(const std::string& scenario,
                        const std::string& params_file) {
  if (!scenario.empty() && !params_file.empty()) {
    throw std::invalid_argument("give either --scenario or --params, not both");
  }
  if (!scenario.empty()) return scenario_by_name(scenario);
  if (!params_file.empty()) return params_from_json(read_json_file(params_file));
  throw std::invalid_argument("one of --scenario or --params is required");
}

struct SimulateArgs {
  std::string scenario;
  std::string params_file;
  std::int64_t T = 0;
  std::int64_t burn_in = 500;
  std::uint64_t seed = 0;
  bool force = false;
  std::string out = ".";
};

int cmd_simulate(const SimulateArgs& args) {
  const ModelParams params = load_params(args.scenario, args.params_file);
  const auto check = check_stationary(params);
  std::cout << "companion spectral radius: " << check.radius << "\n";
  if (!check.stationary && !args.force) {
    throw std::invalid_argument(
        "non-stationary parameters; pass --force-nonstationary to simulate anyway");
  }
  RngStream rng(args.seed);
  SimulateOptions opts;
  opts.burn_in = args.burn_in;
  opts.force_nonstationary = args.force;
  const CountSeries series = simulate(
      params, args.T, opts, InnovationSampler::poisson(params.Lambda), rng);

  const nlohmann::json config = {{"command", "simulate"},
                                 {"scenario", args.scenario},
                                 {"params", args.params_file},
                                 {"T", args.T},
                                 {"burn_in", args.burn_in},
                                 {"seed", args.seed},
                                 {"force", args.force}};
  write_series_csv(series, out_path(args.out, "series.csv"));
  nlohmann::json params_doc = params_to_json(params);
  params_doc["meta"] = run_meta(config, args.seed, true);
  params_doc["meta"]["radius"] = check.radius;
  write_json_file(params_doc, out_path(args.out, "params.json"));
  std::cout << "wrote " << out_path(args.out, "series.csv") << " ("
            << series.size() << " observations)\n";
  return 0;
}

struct FitArgs {
  std::string data;
  int p = 0;
  int p_bar = 0;
  std::string method = "icls";
  std::int64_t train_T = 0;
  int bootstrap = 0;
  bool pooled_se = false;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int jobs = default_jobs();
  std::string out = ".";
};

int cmd_fit(const FitArgs& args) {
  CountSeries series = read_series_csv(args.data);
  if (args.train_T > 0) {
    if (args.train_T > static_cast<std::int64_t>(series.size())) {
      throw std::invalid_argument("--train-T exceeds series length");
    }
    series.resize(static_cast<std::size_t>(args.train_T));
  }
  const FitMethod method = fit_method_from_string(args.method);

  int p = args.p;
  nlohmann::json order_info;
  if (p < 1) {
    if (args.p_bar < 1) {
      throw std::invalid_argument("either --p or --p-bar is required");
    }
    const OrderSelection sel =
        select_order(series, args.p_bar, method, args.jobs);
    p = sel.p_hat;
    order_info = {{"p_bar", sel.p_bar},
                  {"ic_values", sel.ic_values},
                  {"p_hat", sel.p_hat}};
  }

  const nlohmann::json config = {{"command", "fit"},      {"data", args.data},
                                 {"p", p},                {"method", args.method},
                                 {"train_T", args.train_T},
                                 {"bootstrap", args.bootstrap}};

  nlohmann::json doc;
  if (method == FitMethod::proj) {
    const ProjFit fit = proj_fit(series, p);
    if (args.bootstrap > 0) {
      if (!args.has_seed) {
        throw std::invalid_argument("--bootstrap-se requires --seed");
      }
      const BootstrapSe boot = proj_bootstrap_se(
          fit, static_cast<Eigen::Index>(series.size()), args.bootstrap,
          args.seed);
      doc = proj_fit_to_json(fit, &boot);
    } else {
      doc = proj_fit_to_json(fit);
    }
  } else {
    const ProjFit init = proj_fit(series, p);
    const IclsFit fit = icls_fit(series, p, init);
    IclsOptions se_options;
    se_options.sandwich_middle = !args.pooled_se;
    const IclsSe se = icls_standard_errors(fit, series, se_options);
    doc = icls_fit_to_json(fit, se);
    doc["se_middle"] = args.pooled_se ? "pooled" : "sandwich";
  }
  if (!order_info.is_null()) doc["order_selection"] = order_info;
  doc["meta"] = run_meta(config, args.seed, args.has_seed);
  write_json_file(doc, out_path(args.out, "fit.json"));
  std::cout << "wrote " << out_path(args.out, "fit.json") << " (method "
            << args.method << ", p=" << p << ")\n";
  return 0;
}

struct SelectOrderArgs {
  std::string data;
  int p_bar = 6;
  std::string method = "icls";
  int jobs = default_jobs();
  std::string out = ".";
};

int cmd_select_order(const SelectOrderArgs& args) {
  const CountSeries series = read_series_csv(args.data);
  const OrderSelection sel = select_order(
      series, args.p_bar, fit_method_from_string(args.method), args.jobs);

  const nlohmann::json config = {{"command", "select-order"},
                                 {"data", args.data},
                                 {"p_bar", args.p_bar},
                                 {"method", args.method}};
  nlohmann::json doc;
  doc["p_bar"] = sel.p_bar;
  doc["p_hat"] = sel.p_hat;
  doc["ic_values"] = sel.ic_values;
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& c : sel.candidates) {
    candidates.push_back({{"p", c.p},
                          {"ic1", c.ic1},
                          {"degenerate", c.degenerate},
                          {"converged", c.converged},
                          {"sweeps", c.sweeps}});
  }
  doc["candidates"] = std::move(candidates);
  doc["meta"] = run_meta(config, 0, false);
  write_json_file(doc, out_path(args.out, "order.json"));

  std::ostringstream csv;
  csv << "p_tilde,ic1\n";
  for (const auto& c : sel.candidates) {
    char value[32];
    std::snprintf(value, sizeof(value), "%.12g", c.ic1);
    csv << c.p << ',' << value << '\n';
  }
  write_text_file(csv.str(), out_path(args.out, "order.csv"));
  std::cout << "selected order p = " << sel.p_hat << "\n";
  return 0;
}

struct ReplicateArgs {
  std::string mode = "estimate";
  std::string scenario;
  std::string params_file;
  int true_p = 1;
  std::int64_t m = 2;
  std::int64_t n = 2;
  std::vector<std::int64_t> T_grid{200, 600, 1000};
  int reps = 0;
  int p_bar = 6;
  std::string method = "both";
  int bootstrap = 200;
  std::int64_t burn_in = 500;
  std::uint64_t seed = 0;
  int jobs = default_jobs();
  std::string out = ".";
};

int cmd_replicate(const ReplicateArgs& args) {
  if (args.reps < 2) throw std::invalid_argument("--reps must be >= 2");
  std::vector<Eigen::Index> grid(args.T_grid.begin(), args.T_grid.end());

  const nlohmann::json config = {
      {"command", "replicate"}, {"mode", args.mode},
      {"scenario", args.scenario}, {"params", args.params_file},
      {"true_p", args.true_p},  {"T", args.T_grid},
      {"reps", args.reps},      {"p_bar", args.p_bar},
      {"method", args.method},  {"bootstrap", args.bootstrap},
      {"seed", args.seed},      {"burn_in", args.burn_in}};

  nlohmann::json doc;
  std::string text;
  if (args.mode == "estimate") {
    const ModelParams truth = load_params(args.scenario, args.params_file);
    std::vector<FitMethod> methods;
    if (args.method == "both") {
      methods = {FitMethod::proj, FitMethod::icls};
    } else {
      methods = {fit_method_from_string(args.method)};
    }
    nlohmann::json reports = nlohmann::json::array();
    for (const FitMethod method : methods) {
      EstimationStudyConfig cfg;
      cfg.truth = truth;
      cfg.T_grid = grid;
      cfg.replications = args.reps;
      cfg.method = method;
      cfg.seed = args.seed;
      cfg.burn_in = args.burn_in;
      cfg.bootstrap_reps = args.bootstrap;
      cfg.jobs = args.jobs;
      const EstimationReport report = run_estimation_study(cfg);
      reports.push_back(estimation_report_to_json(report));
      text += format_estimation_table(report) + "\n";
    }
    doc["estimation"] = std::move(reports);
  } else if (args.mode == "order") {
    OrderStudyConfig cfg;
    cfg.m = args.m;
    cfg.n = args.n;
    cfg.true_p = args.true_p;
    cfg.T_grid = grid;
    cfg.replications = args.reps;
    cfg.p_bar = args.p_bar;
    cfg.method = args.method == "both" ? FitMethod::icls
                                       : fit_method_from_string(args.method);
    cfg.seed = args.seed;
    cfg.burn_in = args.burn_in;
    cfg.jobs = args.jobs;
    const OrderStudyReport report = run_order_study(cfg);
    doc["order"] = order_report_to_json(report);
    text = format_order_table(report);
  } else {
    throw std::invalid_argument("--mode must be 'estimate' or 'order'");
  }

  doc["meta"] = run_meta(config, args.seed, true);
  write_json_file(doc, out_path(args.out, "report.json"));
  write_text_file(text, out_path(args.out, "report.txt"));
  std::cout << text;
  return 0;
}

struct ForecastArgs {
  std::string params_file;
  std::string data;
  std::int64_t origin = 0;  // 0: forecast past the end, no metrics
  int horizon = 12;
  std::string round = "none";
  std::string out = ".";
};

int cmd_forecast(const ForecastArgs& args) {
  const ModelParams params = params_from_json(read_json_file(args.params_file));
  const CountSeries series = read_series_csv(args.data);
  const auto T = static_cast<std::int64_t>(series.size());
  const std::int64_t origin = args.origin == 0 ? T : args.origin;
  if (origin < params.p || origin > T) {
    throw std::invalid_argument("--origin must lie in [p, T]");
  }
  const bool metrics = origin < T;
  if (metrics && origin + args.horizon > T) {
    throw std::invalid_argument("horizon exceeds held-out data after --origin");
  }

  const ForecastPath path = forecast(
      params,
      std::span<const CountMatrix>(series.data(),
                                   static_cast<std::size_t>(origin)),
      args.horizon);

  const nlohmann::json config = {{"command", "forecast"},
                                 {"params", args.params_file},
                                 {"data", args.data},
                                 {"origin", origin},
                                 {"horizon", args.horizon},
                                 {"round", args.round}};
  nlohmann::json doc;
  doc["origin"] = origin;
  doc["horizon"] = args.horizon;
  nlohmann::json values = nlohmann::json::array();
  for (const auto& value : path.values) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < value.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < value.cols(); ++j) row.push_back(value(i, j));
      rows.push_back(std::move(row));
    }
    values.push_back(std::move(rows));
  }
  doc["forecasts"] = std::move(values);
  if (args.round != "none") {
    const RoundingMode mode = args.round == "floor" ? RoundingMode::floor
                                                    : RoundingMode::nearest;
    nlohmann::json rounded = nlohmann::json::array();
    for (const auto& value : path.values) {
      const CountMatrix r = round_forecast(value, mode);
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index i = 0; i < r.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < r.cols(); ++j) row.push_back(r(i, j));
        rows.push_back(std::move(row));
      }
      rounded.push_back(std::move(rows));
    }
    doc["rounded_forecasts"] = std::move(rounded);
  }

  if (metrics) {
    const std::vector<double> curve = cmpe(params, series, origin, args.horizon);
    doc["mspe"] = curve.back();
    doc["cmpe"] = curve;
    doc["mrss"] = mrss(params, series);
    std::ostringstream csv;
    csv << "S,cmpe,log_cmpe\n";
    for (std::size_t s = 0; s < curve.size(); ++s) {
      char value[32], logv[32];
      std::snprintf(value, sizeof(value), "%.12g", curve[s]);
      std::snprintf(logv, sizeof(logv), "%.12g", std::log(curve[s]));
      csv << (s + 1) << ',' << value << ',' << logv << '\n';
    }
    write_text_file(csv.str(), out_path(args.out, "cmpe.csv"));
  }
  doc["meta"] = run_meta(config, 0, false);
  write_json_file(doc, out_path(args.out, "forecast.json"));
  std::cout << "wrote " << out_path(args.out, "forecast.json") << "\n";
  return 0;
}

struct DiagnoseArgs {
  std::string params_file;
  std::string data;
  int delays = 24;
  std::string out = ".";
};

int cmd_diagnose(const DiagnoseArgs& args) {
  const ModelParams params = params_from_json(read_json_file(args.params_file));
  const CountSeries series = read_series_csv(args.data);
  const Matrix residuals = residual_matrix(params, series);
  const std::vector<PortmanteauEntry> table = portmanteau(residuals, args.delays);

  const nlohmann::json config = {{"command", "diagnose"},
                                 {"params", args.params_file},
                                 {"data", args.data},
                                 {"delays", args.delays}};
  nlohmann::json doc;
  doc["statistic"] = "hosking-portmanteau";
  doc["mrss"] = mrss(params, series);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& entry : table) {
    rows.push_back({{"delay", entry.delay},
                    {"statistic", entry.statistic},
                    {"p_value", entry.p_value}});
  }
  doc["portmanteau"] = std::move(rows);
  doc["meta"] = run_meta(config, 0, false);
  write_json_file(doc, out_path(args.out, "diagnostics.json"));

  std::cout << "mrss: " << mrss(params, series) << "\n";
  std::cout << "delay  statistic   p_value\n";
  for (const auto& entry : table) {
    char line[64];
    std::snprintf(line, sizeof(line), "%5d  %9.3f  %8.4f\n", entry.delay,
                  entry.statistic, entry.p_value);
    std::cout << line;
  }
  return 0;
}

struct AcfArgs {
  std::string data;
  int max_lag = 10;
  std::string out = ".";
};

int cmd_acf(const AcfArgs& args) {
  const CountSeries series = read_series_csv(args.data);
  const CrossAcf acf = cross_acf(series, args.max_lag);
  std::ostringstream csv;
  csv << "flavor,lag,i,j,value\n";
  const auto emit = [&](const char* flavor, const std::vector<Matrix>& blocks) {
    for (std::size_t h = 0; h < blocks.size(); ++h) {
      const Matrix& block = blocks[h];
      for (Eigen::Index i = 0; i < block.rows(); ++i) {
        for (Eigen::Index j = 0; j < block.cols(); ++j) {
          char value[32];
          std::snprintf(value, sizeof(value), "%.12g", block(i, j));
          csv << flavor << ',' << h << ',' << (i + 1) << ',' << (j + 1) << ','
              << value << '\n';
        }
      }
    }
  };
  emit("column", acf.column_wise);
  emit("row", acf.row_wise);
  write_text_file(csv.str(), out_path(args.out, "crossacf.csv"));
  std::cout << "wrote " << out_path(args.out, "crossacf.csv") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix-variate integer-valued autoregression toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "simulate a series");
  sim_cmd->add_option("--scenario", sim.scenario, "built-in scenario name");
  sim_cmd->add_option("--params", sim.params_file, "parameter json file");
  sim_cmd->add_option("--T", sim.T, "series length")->required();
  sim_cmd->add_option("--burn-in", sim.burn_in, "burn-in steps");
  sim_cmd->add_option("--seed", sim.seed, "rng seed")->required();
  sim_cmd->add_flag("--force-nonstationary", sim.force,
                    "allow explosive parameters");
  sim_cmd->add_option("--out", sim.out, "output directory");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit a model to a series");
  fit_cmd->add_option("--data", fit.data, "series csv")->required();
  fit_cmd->add_option("--p", fit.p, "autoregressive order");
  fit_cmd->add_option("--p-bar", fit.p_bar, "select order up to this bound");
  fit_cmd->add_option("--method", fit.method, "proj or icls");
  fit_cmd->add_option("--train-T", fit.train_T, "fit on this prefix only");
  fit_cmd->add_option("--bootstrap-se", fit.bootstrap,
                      "bootstrap replicates for proj A/B standard errors");
  fit_cmd->add_flag("--pooled-se", fit.pooled_se,
                    "pooled residual covariance in the icls standard errors");
  auto* fit_seed = fit_cmd->add_option("--seed", fit.seed, "rng seed");
  fit_cmd->add_option("--jobs", fit.jobs, "worker threads");
  fit_cmd->add_option("--out", fit.out, "output directory");
  fit_cmd->callback([&]() { fit.has_seed = fit_seed->count() > 0; });

  SelectOrderArgs sel;
  auto* sel_cmd = app.add_subcommand("select-order", "order selection");
  sel_cmd->add_option("--data", sel.data, "series csv")->required();
  sel_cmd->add_option("--p-bar", sel.p_bar, "maximum candidate order");
  sel_cmd->add_option("--method", sel.method, "proj or icls");
  sel_cmd->add_option("--jobs", sel.jobs, "worker threads");
  sel_cmd->add_option("--out", sel.out, "output directory");

  ReplicateArgs rep;
  auto* rep_cmd = app.add_subcommand("replicate", "monte-carlo study");
  rep_cmd->add_option("--mode", rep.mode, "estimate or order");
  rep_cmd->add_option("--scenario", rep.scenario, "built-in scenario name");
  rep_cmd->add_option("--params", rep.params_file, "parameter json file");
  rep_cmd->add_option("--true-p", rep.true_p, "true order (order mode)");
  rep_cmd->add_option("--m", rep.m, "rows (order mode)");
  rep_cmd->add_option("--n", rep.n, "cols (order mode)");
  rep_cmd->add_option("--T", rep.T_grid, "sample sizes")->expected(-1);
  rep_cmd->add_option("--reps", rep.reps, "replications")->required();
  rep_cmd->add_option("--p-bar", rep.p_bar, "maximum candidate order");
  rep_cmd->add_option("--method", rep.method, "proj, icls, or both");
  rep_cmd->add_option("--bootstrap-se", rep.bootstrap,
                      "bootstrap replicates for proj standard errors");
  rep_cmd->add_option("--burn-in", rep.burn_in, "burn-in steps");
  rep_cmd->add_option("--seed", rep.seed, "master seed")->required();
  rep_cmd->add_option("--jobs", rep.jobs, "worker threads");
  rep_cmd->add_option("--out", rep.out, "output directory");

  ForecastArgs fc;
  auto* fc_cmd = app.add_subcommand("forecast", "h-step forecasts");
  fc_cmd->add_option("--params", fc.params_file, "fitted params json")->required();
  fc_cmd->add_option("--data", fc.data, "series csv")->required();
  fc_cmd->add_option("--origin,--split", fc.origin,
                     "forecast origin (prefix length); default: end of series");
  fc_cmd->add_option("--horizon", fc.horizon, "steps ahead");
  fc_cmd->add_option("--round", fc.round, "none, nearest, or floor");
  fc_cmd->add_option("--out", fc.out, "output directory");

  DiagnoseArgs diag;
  auto* diag_cmd = app.add_subcommand("diagnose", "residual diagnostics");
  diag_cmd->add_option("--params", diag.params_file, "fitted params json")
      ->required();
  diag_cmd->add_option("--data", diag.data, "series csv")->required();
  diag_cmd->add_option("--delays", diag.delays, "portmanteau delay orders");
  diag_cmd->add_option("--out", diag.out, "output directory");

  AcfArgs acf;
  auto* acf_cmd = app.add_subcommand("acf", "cross-autocorrelation table");
  acf_cmd->add_option("--data", acf.data, "series csv")->required();
  acf_cmd->add_option("--max-lag", acf.max_lag, "largest lag");
  acf_cmd->add_option("--out", acf.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : 2;
  }

  try {
    if (*sim_cmd) return cmd_simulate(sim);
    if (*fit_cmd) return cmd_fit(fit);
    if (*sel_cmd) return cmd_select_order(sel);
    if (*rep_cmd) return cmd_replicate(rep);
    if (*fc_cmd) return cmd_forecast(fc);
    if (*diag_cmd) return cmd_diagnose(diag);
    if (*acf_cmd) return cmd_acf(acf);
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
