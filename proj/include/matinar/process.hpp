#pragma once

#include <functional>
#include <span>
#include <vector>

#include "matinar/linalg.hpp"
#include "matinar/rng.hpp"
#include "matinar/thinning.hpp"

namespace matinar {

/// Coefficients of a matrix-variate INAR(p) process
///   Y_t = Σ_l A_l ∘_L Y_{t-l} ∘_R B_lᵀ + ε_t,
/// with row-interaction matrices A_l (m×m), column-interaction matrices
/// B_l (n×n), all entries in [0, 1], and innovation mean Lambda (m×n).
/// The identifiability gauge is ‖A_l‖_F = 1 for each lag.
struct ModelParams {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  int p = 0;
  std::vector<Matrix> A;
  std::vector<Matrix> B;
  Matrix Lambda;

  /// Throws std::invalid_argument on shape mismatches, entries outside
  /// [0, 1], negative innovation means, or non-finite values.
  void validate() const;

  /// Nearest usable parameter set for simulation/forecast consumers:
  /// clamp A/B to [0, 1], restore the unit-norm gauge on A, clamp
  /// Lambda to nonnegative.
  ModelParams feasible() const;
};

Matrix companion(const ModelParams& params);

struct StationarityCheck {
  double radius = 0.0;
  bool stationary = false;
};

/// radius = spectral radius of the companion matrix; stationary iff < 1.
StationarityCheck check_stationary(const ModelParams& params);

/// Innovation draw: m×n count matrix with a known mean matrix.
class InnovationSampler {
 public:
  /// Independent Poisson entries with means lambda(i,j).
  static InnovationSampler poisson(const Matrix& lambda);

  /// Finite pmf over count matrices; probabilities must sum to 1.
  static InnovationSampler from_table(std::vector<CountMatrix> atoms,
                                      std::vector<double> probs);

  /// Arbitrary user sampler with a declared mean.
  static InnovationSampler custom(Matrix mean,
                                  std::function<CountMatrix(RngStream&)> draw);

  CountMatrix draw(RngStream& rng) const { return draw_(rng); }
  const Matrix& mean() const { return mean_; }

 private:
  InnovationSampler() = default;
  Matrix mean_;
  std::function<CountMatrix(RngStream&)> draw_;
};

struct SimulateOptions {
  Eigen::Index burn_in = 500;
  bool force_nonstationary = false;
};

/// Simulate T observations after discarding burn_in steps, starting from
/// zero matrices. Refuses non-stationary parameters unless forced.
CountSeries simulate(const ModelParams& params, Eigen::Index T,
                     const SimulateOptions& opts,
                     const InnovationSampler& innovations, RngStream& rng);

/// Poisson(Lambda) innovations, default burn-in.
CountSeries simulate(const ModelParams& params, Eigen::Index T,
                     Eigen::Index burn_in, std::uint64_t seed);

/// One-step conditional mean Σ_l A_l · lags[l-1] · B_lᵀ + Lambda, where
/// lags[0] is the most recent observation.
Matrix conditional_mean(const ModelParams& params,
                        std::span<const CountMatrix> lags);

/// Stationary mean: unvec of (I - Σ_l B_l⊗A_l)⁻¹ vec(Lambda).
Matrix stationary_mean(const ModelParams& params);

/// Sample lag-h autocovariance in Kronecker arrangement:
/// (1/(T-|h|)) Σ_t (Y_{t+h} - Ȳ) ⊗ (Y_t - Ȳ)ᵀ with Ȳ the full-series
/// mean. Supports negative h.
Matrix empirical_autocov_kron(const CountSeries& series, Eigen::Index h);

struct ColumnRowAutocov {
  Matrix column_wise;  // T · Γ̂_h : block (i,j) pairs columns j and i
  Matrix row_wise;     // Γ̂_h · T : block (i,j) pairs rows i and j
};

ColumnRowAutocov column_row_autocov(const CountSeries& series,
                                    Eigen::Index h);

/// Lag-indexed correlation blocks: the column-wise and row-wise
/// autocovariances normalized entrywise by the matched-window standard
/// deviations of the two entries involved, so every value lies in [-1, 1]
/// and the lag-0 diagonals are exactly 1. Index = lag 0..max_lag.
struct CrossAcf {
  std::vector<Matrix> column_wise;
  std::vector<Matrix> row_wise;
};

CrossAcf cross_acf(const CountSeries& series, Eigen::Index max_lag);

}  // namespace matinar
