#pragma once

#include "matinar/projection.hpp"

namespace matinar {

struct IclsOptions {
  int max_sweeps = 500;
  double tol = 1e-9;            // max Frobenius block change at convergence
  double sv_cutoff = 1e-12;     // relative singular-value cutoff in the Gram solves
  bool sandwich_middle = true;  // residual-sandwich middle term for the SEs
};

struct IclsFit {
  Eigen::Index m = 0, n = 0;
  int p = 0;
  std::vector<Matrix> A;  // ‖A_l‖_F = 1 after the final gauge fix
  std::vector<Matrix> B;
  Matrix Lambda;
  int sweeps = 0;
  bool converged = false;
  bool gram_warning = false;           // a block solve went through the pseudo-inverse
  std::vector<double> objective_trace;  // initial value, then one entry per sweep
  double condition_number = 0.0;        // of the seeding least-squares design
  Eigen::Index residual_count = 0;      // T - p

  ModelParams params() const;
};

/// Criterion value Σ_{t=p+1}^T ‖Y_t − Σ_l A_l Y_{t-l} B_lᵀ − Lambda‖_F².
double icls_objective(const ModelParams& params, const CountSeries& series);

/// Iterated conditional least squares: block coordinate descent with exact
/// per-block solutions, seeded by the projection estimates. Each A_l, B_l,
/// Lambda update minimizes the criterion given the freshest other blocks,
/// so the objective trace is non-increasing. The gauge is re-fixed once per
/// sweep (objective-invariant). Non-convergence returns the last iterate
/// with converged = false.
IclsFit icls_fit(const CountSeries& series, int p, const ProjFit& init,
                 const IclsOptions& opts = {});

struct IclsSe {
  Vector se;  // stacked (vec A₁, rows of B₁, ..., vec Lambda) order
  std::vector<Matrix> se_A;
  std::vector<Matrix> se_B;
  Matrix se_Lambda;
};

/// Sandwich standard errors from the stacked per-observation regressor
/// P_t = (B₁Y_{t-1}ᵀ⊗I_m, I_n⊗A₁Y_{t-1}, ..., I_mn)ᵀ with the unit-norm
/// gauge handled by a rank-1 augmentation per lag. The B_l block of P_t is
/// ordered row-major (vec B_lᵀ); the extraction maps entries back.
IclsSe icls_standard_errors(const IclsFit& fit, const CountSeries& series,
                            const IclsOptions& opts = {});

}  // namespace matinar
