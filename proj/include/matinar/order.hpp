#pragma once

#include "matinar/icls.hpp"

namespace matinar {

struct OrderCandidate {
  int p = 0;
  double ic1 = 0.0;
  bool degenerate = false;  // residual sum clamped before the log
  bool converged = true;    // ICLS convergence flag (true for proj fits)
  int sweeps = 0;
};

struct OrderSelection {
  int p_bar = 0;
  std::vector<double> ic_values;  // index 0 ↔ order 1
  int p_hat = 0;
  std::vector<OrderCandidate> candidates;
};

/// Criterion value for already-fitted parameters at order params.p:
/// log((1/T) Σ_{t=p+1}^T ‖Y_t − Σ_l A_l Y_{t-l} B_lᵀ − Lambda‖_F²)
///   + p·log(T)/T.
/// The normalizer is 1/T even though the sum starts at p+1.
double ic1_from_params(const CountSeries& series, const ModelParams& params);

/// Fit at order p_tilde with the given method, then evaluate the criterion.
double ic1(const CountSeries& series, int p_tilde,
           FitMethod method = FitMethod::icls, const IclsOptions& opts = {});

/// argmin of the criterion over orders 1..p_bar; ties break toward the
/// smaller order. Candidate fits are independent; jobs > 1 runs them
/// concurrently.
OrderSelection select_order(const CountSeries& series, int p_bar,
                            FitMethod method = FitMethod::icls, int jobs = 1,
                            const IclsOptions& opts = {});

}  // namespace matinar
