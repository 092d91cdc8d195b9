#pragma once

#include <cstdint>
#include <vector>

#include "matinar/process.hpp"

namespace matinar {

enum class FitMethod { proj, icls };

const char* to_string(FitMethod method);
FitMethod fit_method_from_string(const std::string& name);

/// Regressor/response pair of the vectorized least-squares problem: the row
/// for response vec(Y_t)ᵀ is (vec(Y_{t-1})ᵀ, ..., vec(Y_{t-p})ᵀ, 1).
struct ClsDesign {
  Matrix X;  // (T-p) × (p·m·n + 1)
  Matrix Y;  // (T-p) × (m·n)
};

ClsDesign build_cls_design(const CountSeries& series, int p);

struct ClsFit {
  Eigen::Index m = 0, n = 0;
  int p = 0;
  Matrix Psi;               // (p·m·n + 1) × mn, rows stacked (Φ₁ᵀ; …; Φ_pᵀ; vec(Λ)ᵀ)
  std::vector<Matrix> Phi;  // mn×mn per lag
  Matrix Lambda;            // m×n
  Matrix X;                 // retained design matrix
  Matrix residuals;         // (T-p) × mn, row t = Ûₜᵀ
  double condition_number = 0.0;
};

/// Least-squares fit of the vectorized model via column-pivoted QR.
ClsFit cls_fit(const CountSeries& series, int p);

struct NkpFactors {
  Matrix A;  // unit Frobenius norm
  Matrix B;
};

/// Frobenius-nearest Kronecker factorization phi ≈ B⊗A via the leading
/// singular pair of the rearranged matrix; vec(A) = u, vec(B) = σ·v.
NkpFactors nkp_project(const Matrix& phi, Eigen::Index m, Eigen::Index n);

struct ProjSe {
  std::vector<Matrix> se_Phi;  // entrywise, mn×mn per lag
  Matrix se_Lambda;            // m×n
  Matrix Sigma_U;              // Σ Ûₜ Ûₜᵀ / (T - mn - p)
  Matrix H;                    // Σ Xₜ Xₜᵀ / (T - p)
};

/// Plug-in asymptotic standard errors for the least-squares estimates of
/// Φ_l and Lambda. Throws std::domain_error when H is singular.
ProjSe proj_standard_errors(const ClsFit& fit);

struct ProjFit {
  Eigen::Index m = 0, n = 0;
  int p = 0;
  std::vector<Matrix> Phi;
  std::vector<Matrix> A;  // projected factors, ‖A_l‖_F = 1
  std::vector<Matrix> B;
  Matrix Lambda;
  std::vector<Matrix> se_Phi;
  Matrix se_Lambda;
  Matrix Sigma_U;
  Matrix H;
  Matrix residuals;  // (T-p) × mn
  double condition_number = 0.0;

  ModelParams params() const;
};

/// Projection estimation: least squares on the vectorized model followed by
/// the nearest-Kronecker-product factorization of each Φ̂_l.
ProjFit proj_fit(const CountSeries& series, int p);

struct BootstrapSe {
  std::vector<Matrix> se_A;
  std::vector<Matrix> se_B;
  Matrix se_Lambda;
  int replicates = 0;
};

/// Parametric-bootstrap standard errors for the projected factors: refit on
/// series simulated from the (feasibility-projected) estimates with Poisson
/// innovations. Seed-controlled and deterministic.
BootstrapSe proj_bootstrap_se(const ProjFit& fit, Eigen::Index T,
                              int replicates, std::uint64_t seed);

}  // namespace matinar
