#include "matinar/replicate.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "matinar/scenario.hpp"

namespace matinar {

void parallel_for_index(std::size_t count, int jobs,
                        const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(count, jobs < 1 ? 1 : static_cast<std::size_t>(jobs));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::string> parameter_labels(Eigen::Index m, Eigen::Index n,
                                          int p) {
  std::vector<std::string> labels;
  const auto push_block = [&](const char* base, Eigen::Index dim, int lag) {
    for (Eigen::Index j = 1; j <= dim; ++j) {
      for (Eigen::Index i = 1; i <= dim; ++i) {
        std::string name = std::string(base) + std::to_string(i) +
                           std::to_string(j);
        if (p > 1) name += "_l" + std::to_string(lag);
        labels.push_back(std::move(name));
      }
    }
  };
  for (int l = 1; l <= p; ++l) push_block("a", m, l);
  for (int l = 1; l <= p; ++l) push_block("b", n, l);
  for (Eigen::Index j = 1; j <= n; ++j) {
    for (Eigen::Index i = 1; i <= m; ++i) {
      labels.push_back("lambda" + std::to_string(i) + std::to_string(j));
    }
  }
  return labels;
}

namespace {

// Stacked (vec A_1..A_p, vec B_1..B_p, vec Lambda) in label order.
Vector stack_params(const std::vector<Matrix>& A, const std::vector<Matrix>& B,
                    const Matrix& lambda) {
  const auto p = static_cast<Eigen::Index>(A.size());
  const Eigen::Index a_size = A[0].size();
  const Eigen::Index b_size = B[0].size();
  Vector out(p * (a_size + b_size) + lambda.size());
  Eigen::Index at = 0;
  for (const auto& a : A) {
    out.segment(at, a_size) = vec(a);
    at += a_size;
  }
  for (const auto& b : B) {
    out.segment(at, b_size) = vec(b);
    at += b_size;
  }
  out.segment(at, lambda.size()) = vec(lambda);
  return out;
}

std::uint64_t grid_stream(std::size_t t_index, std::size_t rep) {
  return (static_cast<std::uint64_t>(t_index) << 32) |
         static_cast<std::uint64_t>(rep);
}

}  // namespace

EstimationReport run_estimation_study(const EstimationStudyConfig& config) {
  config.truth.validate();
  if (config.replications < 2) {
    throw std::invalid_argument("estimation study: need at least 2 replications");
  }
  if (config.method == FitMethod::proj && config.bootstrap_reps < 2) {
    throw std::invalid_argument(
        "estimation study: proj standard errors need bootstrap_reps >= 2");
  }
  const ModelParams& truth = config.truth;
  const Vector true_theta = stack_params(truth.A, truth.B, truth.Lambda);
  const Eigen::Index dim = true_theta.size();

  EstimationReport report;
  report.method = config.method;
  report.replications = config.replications;
  report.labels = parameter_labels(truth.m, truth.n, truth.p);

  for (std::size_t t_index = 0; t_index < config.T_grid.size(); ++t_index) {
    const Eigen::Index T = config.T_grid[t_index];
    const auto reps = static_cast<std::size_t>(config.replications);
    Matrix estimates(config.replications, dim);
    Matrix ses(config.replications, dim);

    parallel_for_index(reps, config.jobs, [&](std::size_t rep) {
      RngStream rng(config.seed, grid_stream(t_index, rep));
      SimulateOptions opts;
      opts.burn_in = config.burn_in;
      const CountSeries series =
          simulate(truth, T, opts,
                   InnovationSampler::poisson(truth.Lambda), rng);
      const auto row = static_cast<Eigen::Index>(rep);
      if (config.method == FitMethod::proj) {
        const ProjFit fit = proj_fit(series, truth.p);
        estimates.row(row) =
            stack_params(fit.A, fit.B, fit.Lambda).transpose();
        const BootstrapSe boot = proj_bootstrap_se(
            fit, T, config.bootstrap_reps,
            config.seed ^ (0x626f6f74ULL * (grid_stream(t_index, rep) + 1)));
        ses.row(row) =
            stack_params(boot.se_A, boot.se_B, fit.se_Lambda).transpose();
      } else {
        const ProjFit init = proj_fit(series, truth.p);
        const IclsFit fit = icls_fit(series, truth.p, init);
        const IclsSe se = icls_standard_errors(fit, series);
        estimates.row(row) =
            stack_params(fit.A, fit.B, fit.Lambda).transpose();
        ses.row(row) =
            stack_params(se.se_A, se.se_B, se.se_Lambda).transpose();
      }
    });

    EstimationRow row;
    row.T = T;
    const Vector mean_est = estimates.colwise().mean();
    row.bias = mean_est - true_theta;
    row.sd.resize(dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
      row.sd[c] = std::sqrt(
          (estimates.col(c).array() - mean_est[c]).square().sum() /
          static_cast<double>(config.replications - 1));
    }
    row.mean_se = ses.colwise().mean();
    report.rows.push_back(std::move(row));
  }
  return report;
}

OrderStudyReport run_order_study(const OrderStudyConfig& config) {
  if (config.replications < 1) {
    throw std::invalid_argument("order study: need at least 1 replication");
  }
  if (config.true_p < 1 || config.true_p > config.p_bar) {
    throw std::invalid_argument("order study: true_p must lie in [1, p_bar]");
  }
  const Matrix lambda = config.lambda.size() > 0
                            ? config.lambda
                            : Matrix::Ones(config.m, config.n);

  OrderStudyReport report;
  report.true_p = config.true_p;
  report.p_bar = config.p_bar;
  report.replications = config.replications;

  for (std::size_t t_index = 0; t_index < config.T_grid.size(); ++t_index) {
    const Eigen::Index T = config.T_grid[t_index];
    std::vector<int> selected(static_cast<std::size_t>(config.replications));

    parallel_for_index(
        static_cast<std::size_t>(config.replications), config.jobs,
        [&](std::size_t rep) {
          // The truth stream depends on the replication only, so the same
          // truths recur for every T in the grid.
          RngStream truth_rng(config.seed, 0x74727574ULL);
          truth_rng = truth_rng.substream(rep);
          const ModelParams truth = random_scenario(
              config.m, config.n, config.true_p, lambda, truth_rng);
          RngStream rng(config.seed, grid_stream(t_index, rep) | (1ULL << 63));
          SimulateOptions opts;
          opts.burn_in = config.burn_in;
          const CountSeries series = simulate(
              truth, T, opts, InnovationSampler::poisson(lambda), rng);
          selected[rep] =
              select_order(series, config.p_bar, config.method).p_hat;
        });

    OrderRow row;
    row.T = T;
    for (int p_hat : selected) {
      if (p_hat == config.true_p) {
        row.freq_correct += 1.0;
      } else if (p_hat > config.true_p) {
        row.freq_over += 1.0;
      } else {
        row.freq_under += 1.0;
      }
    }
    const auto reps = static_cast<double>(config.replications);
    row.freq_correct /= reps;
    row.freq_over /= reps;
    row.freq_under /= reps;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace matinar
