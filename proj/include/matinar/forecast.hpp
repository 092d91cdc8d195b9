#pragma once

#include <span>
#include <vector>

#include "matinar/process.hpp"

namespace matinar {

struct ForecastPath {
  int horizon = 0;
  std::vector<Matrix> values;  // values[h-1] = Ŷ(h), real-valued
};

/// h-step forecasts by iterating the conditional mean: Ŷ(h) =
/// Σ_l A_l Ỹ(h-l) B_lᵀ + Lambda, where Ỹ(k) is the observation for k <= 0
/// and the previous forecast for k >= 1. history holds at least p
/// observations, most recent last.
ForecastPath forecast(const ModelParams& params,
                      std::span<const CountMatrix> history, int horizon);

enum class RoundingMode { none, nearest, floor };

/// Integer-valued point forecast; not used inside any metric.
CountMatrix round_forecast(const Matrix& value, RoundingMode mode);

/// Residual rows ûₜᵀ = (vec(Y_t) − vec(conditional mean))ᵀ for
/// t = p+1..T; (T-p) × mn.
Matrix residual_matrix(const ModelParams& params, const CountSeries& series);

/// In-sample mean residual norm: (1/T) Σ_{t=p+1}^T ‖Y_t − E(Y_t|past)‖_F.
/// Frobenius norm, not squared; the normalizer is T, not T-p.
double mrss(const ModelParams& params, const CountSeries& series);

/// Out-of-sample prediction error from a forecast origin (the number of
/// observations used as history): (1/H) Σ_h ‖Ŷ(h) − Y_{origin+h}‖_F.
double mspe(const ModelParams& params, const CountSeries& series,
            Eigen::Index origin, int horizon);

/// Cumulative version: entry S-1 holds (1/S) Σ_{h<=S} ‖Ŷ(h) − Y‖_F, so the
/// last entry equals mspe.
std::vector<double> cmpe(const ModelParams& params, const CountSeries& series,
                         Eigen::Index origin, int horizon);

struct PortmanteauEntry {
  int delay = 0;
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Multivariate (Hosking-type) portmanteau statistics on residual vectors,
/// one entry per delay order 1..max_delay:
///   Q(K) = T² Σ_{h=1}^K (T-h)⁻¹ tr(Ĉ_hᵀ Ĉ₀⁻¹ Ĉ_h Ĉ₀⁻¹),
/// with p-values from chi-square with dim²·K degrees of freedom (no
/// reduction for estimated parameters). residuals: rows = time, cols = dim.
std::vector<PortmanteauEntry> portmanteau(const Matrix& residuals,
                                          int max_delay);

/// Chi-square CDF via the regularized incomplete gamma function.
double chi_squared_cdf(double x, double dof);

}  // namespace matinar
