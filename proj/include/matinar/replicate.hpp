#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "matinar/icls.hpp"
#include "matinar/order.hpp"

namespace matinar {

/// Run body(0..count-1) on up to jobs worker threads. Results must be
/// written into per-index slots; aggregation stays deterministic because it
/// happens after the join, keyed by index.
void parallel_for_index(std::size_t count, int jobs,
                        const std::function<void(std::size_t)>& body);

/// Labels a11, a21, ..., b11, ..., lambda11, ... in column-major order per
/// block, with a lag suffix when p > 1.
std::vector<std::string> parameter_labels(Eigen::Index m, Eigen::Index n,
                                          int p);

struct EstimationStudyConfig {
  ModelParams truth;
  std::vector<Eigen::Index> T_grid{200, 600, 1000};
  int replications = 1000;
  FitMethod method = FitMethod::icls;
  std::uint64_t seed = 0;
  Eigen::Index burn_in = 500;
  int bootstrap_reps = 200;  // proj-method A/B standard errors
  int jobs = 1;
};

struct EstimationRow {
  Eigen::Index T = 0;
  Vector bias;     // per parameter, against the true values
  Vector sd;       // sample SD across replications
  Vector mean_se;  // mean reported standard error
};

struct EstimationReport {
  FitMethod method = FitMethod::icls;
  int replications = 0;
  std::vector<std::string> labels;
  std::vector<EstimationRow> rows;  // one per T in the grid
};

/// Bias/SD/mean-SE per parameter across replications: simulate from the
/// truth, fit with the chosen method, aggregate. Deterministic for a fixed
/// seed regardless of the job count.
EstimationReport run_estimation_study(const EstimationStudyConfig& config);

struct OrderStudyConfig {
  Eigen::Index m = 2;
  Eigen::Index n = 2;
  int true_p = 1;
  Matrix lambda;  // defaults to all ones when empty
  std::vector<Eigen::Index> T_grid{200, 600, 1000};
  int replications = 1000;
  int p_bar = 6;
  FitMethod method = FitMethod::icls;
  std::uint64_t seed = 0;
  Eigen::Index burn_in = 500;
  int jobs = 1;
};

struct OrderRow {
  Eigen::Index T = 0;
  double freq_correct = 0.0;  // {p̂ = p}
  double freq_over = 0.0;     // {p̂ > p}
  double freq_under = 0.0;    // {p̂ < p}
};

struct OrderStudyReport {
  int true_p = 0;
  int p_bar = 0;
  int replications = 0;
  std::vector<OrderRow> rows;
};

/// Selection-frequency table over random-coefficient truths. Each
/// replication draws its own truth from the replication-indexed stream, so
/// the same truths recur across every T in the grid.
OrderStudyReport run_order_study(const OrderStudyConfig& config);

}  // namespace matinar
