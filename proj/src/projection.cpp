#include "matinar/projection.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace matinar {

const char* to_string(FitMethod method) {
  return method == FitMethod::proj ? "proj" : "icls";
}

FitMethod fit_method_from_string(const std::string& name) {
  if (name == "proj") return FitMethod::proj;
  if (name == "icls") return FitMethod::icls;
  throw std::invalid_argument("unknown fit method: " + name);
}

ClsDesign build_cls_design(const CountSeries& series, int p) {
  const auto T = static_cast<Eigen::Index>(series.size());
  if (p < 1) throw std::invalid_argument("cls: p must be >= 1");
  if (T <= p) throw std::invalid_argument("cls: series shorter than p + 1");
  const Eigen::Index m = series[0].rows();
  const Eigen::Index n = series[0].cols();
  const Eigen::Index d = m * n;
  const Eigen::Index rows = T - p;
  const Eigen::Index cols = p * d + 1;
  if (rows < cols) {
    throw std::invalid_argument("cls: need T - p >= p*m*n + 1 observations");
  }

  ClsDesign design;
  design.X.resize(rows, cols);
  design.Y.resize(rows, d);
  for (Eigen::Index t = p; t < T; ++t) {
    const Eigen::Index r = t - p;
    design.Y.row(r) = vec(to_real(series[static_cast<std::size_t>(t)])).transpose();
    for (int l = 1; l <= p; ++l) {
      design.X.block(r, (l - 1) * d, 1, d) =
          vec(to_real(series[static_cast<std::size_t>(t - l)])).transpose();
    }
    design.X(r, cols - 1) = 1.0;
  }
  return design;
}

ClsFit cls_fit(const CountSeries& series, int p) {
  ClsDesign design = build_cls_design(series, p);
  const Eigen::Index m = series[0].rows();
  const Eigen::Index n = series[0].cols();
  const Eigen::Index d = m * n;

  Eigen::ColPivHouseholderQR<Matrix> qr(design.X);
  ClsFit fit;
  fit.m = m;
  fit.n = n;
  fit.p = p;
  fit.Psi = qr.solve(design.Y);
  fit.residuals = design.Y - design.X * fit.Psi;
  fit.X = std::move(design.X);

  {
    const Eigen::Index k = fit.Psi.rows();
    const Matrix r_factor = qr.matrixR()
                                .topLeftCorner(k, k)
                                .triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Matrix> svd(r_factor);
    const auto& sv = svd.singularValues();
    fit.condition_number =
        sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1]
                                : std::numeric_limits<double>::infinity();
  }

  // Psi rows are stacked (Phi_1^T; ...; Phi_p^T; vec(Lambda)^T).
  fit.Phi.reserve(static_cast<std::size_t>(p));
  for (int l = 0; l < p; ++l) {
    fit.Phi.push_back(fit.Psi.middleRows(l * d, d).transpose());
  }
  fit.Lambda = unvec(fit.Psi.row(p * d).transpose(), m, n);
  return fit;
}

NkpFactors nkp_project(const Matrix& phi, Eigen::Index m, Eigen::Index n) {
  const Rank1Svd svd = rank1_svd(rearrange(phi, m, n));
  NkpFactors out;
  out.A = unvec(svd.u, m, m);
  out.B = unvec(svd.sigma * svd.v, n, n);
  return out;
}

ProjSe proj_standard_errors(const ClsFit& fit) {
  const Eigen::Index d = fit.m * fit.n;
  const auto rows = fit.residuals.rows();  // T - p
  const Eigen::Index T = rows + fit.p;
  const Eigen::Index sigma_dof = T - d - fit.p;
  if (sigma_dof < 1) {
    throw std::domain_error("proj se: series too short for Sigma_U");
  }

  ProjSe se;
  se.Sigma_U = fit.residuals.transpose() * fit.residuals /
               static_cast<double>(sigma_dof);
  se.H = fit.X.transpose() * fit.X / static_cast<double>(rows);

  Eigen::FullPivLU<Matrix> lu(se.H);
  if (!lu.isInvertible()) {
    throw std::domain_error("proj se: singular regressor moment matrix");
  }
  const Matrix h_inv = lu.inverse();

  // Cov(vec Psi_hat) = Sigma_U ⊗ H^{-1} / (T-p); Psi[(l-1)d + j, i] holds
  // Phi_l(i, j) and the last row holds vec(Lambda).
  const double scale = 1.0 / static_cast<double>(rows);
  se.se_Phi.reserve(static_cast<std::size_t>(fit.p));
  for (int l = 0; l < fit.p; ++l) {
    Matrix block(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        block(i, j) =
            std::sqrt(se.Sigma_U(i, i) * h_inv(l * d + j, l * d + j) * scale);
      }
    }
    se.se_Phi.push_back(std::move(block));
  }
  se.se_Lambda.resize(fit.m, fit.n);
  const Eigen::Index last = fit.p * d;
  for (Eigen::Index c = 0; c < d; ++c) {
    se.se_Lambda(c % fit.m, c / fit.m) =
        std::sqrt(se.Sigma_U(c, c) * h_inv(last, last) * scale);
  }
  return se;
}

ModelParams ProjFit::params() const {
  ModelParams out;
  out.m = m;
  out.n = n;
  out.p = p;
  out.A = A;
  out.B = B;
  out.Lambda = Lambda;
  return out;
}

ProjFit proj_fit(const CountSeries& series, int p) {
  ClsFit cls = cls_fit(series, p);
  ProjSe se = proj_standard_errors(cls);

  ProjFit fit;
  fit.m = cls.m;
  fit.n = cls.n;
  fit.p = p;
  fit.Lambda = std::move(cls.Lambda);
  fit.condition_number = cls.condition_number;
  fit.se_Phi = std::move(se.se_Phi);
  fit.se_Lambda = std::move(se.se_Lambda);
  fit.Sigma_U = std::move(se.Sigma_U);
  fit.H = std::move(se.H);
  fit.residuals = std::move(cls.residuals);
  fit.A.reserve(static_cast<std::size_t>(p));
  fit.B.reserve(static_cast<std::size_t>(p));
  for (int l = 0; l < p; ++l) {
    NkpFactors factors = nkp_project(cls.Phi[l], fit.m, fit.n);
    fit.A.push_back(std::move(factors.A));
    fit.B.push_back(std::move(factors.B));
  }
  fit.Phi = std::move(cls.Phi);
  return fit;
}

BootstrapSe proj_bootstrap_se(const ProjFit& fit, Eigen::Index T,
                              int replicates, std::uint64_t seed) {
  if (replicates < 2) {
    throw std::invalid_argument("bootstrap: need at least 2 replicates");
  }
  ModelParams generator = fit.params().feasible();
  // The bootstrap generator must be stationary; shrink the column factors
  // toward zero if the fitted radius ended up at or above one.
  while (!check_stationary(generator).stationary) {
    for (auto& b : generator.B) b *= 0.95;
  }
  const InnovationSampler innovations =
      InnovationSampler::poisson(generator.Lambda);

  const Eigen::Index a_size = fit.m * fit.m;
  const Eigen::Index b_size = fit.n * fit.n;
  const Eigen::Index l_size = fit.m * fit.n;
  const int p = fit.p;
  const Eigen::Index theta_dim = p * (a_size + b_size) + l_size;
  Matrix draws(replicates, theta_dim);
  RngStream root(seed);
  for (int b = 0; b < replicates; ++b) {
    RngStream rng = root.substream(static_cast<std::uint64_t>(b));
    SimulateOptions opts;
    const CountSeries resampled =
        simulate(generator, T, opts, innovations, rng);
    const ClsFit cls = cls_fit(resampled, p);
    Eigen::Index at = 0;
    for (int l = 0; l < p; ++l) {
      const NkpFactors factors = nkp_project(cls.Phi[l], fit.m, fit.n);
      draws.block(b, at, 1, a_size) = vec(factors.A).transpose();
      draws.block(b, at + a_size, 1, b_size) = vec(factors.B).transpose();
      at += a_size + b_size;
    }
    draws.block(b, at, 1, l_size) = vec(cls.Lambda).transpose();
  }

  const Vector mean = draws.colwise().mean();
  Vector sd(theta_dim);
  for (Eigen::Index c = 0; c < theta_dim; ++c) {
    sd[c] = std::sqrt((draws.col(c).array() - mean[c]).square().sum() /
                      static_cast<double>(replicates - 1));
  }

  BootstrapSe out;
  out.replicates = replicates;
  Eigen::Index at = 0;
  for (int l = 0; l < p; ++l) {
    out.se_A.push_back(unvec(sd.segment(at, a_size), fit.m, fit.m));
    out.se_B.push_back(unvec(sd.segment(at + a_size, b_size), fit.n, fit.n));
    at += a_size + b_size;
  }
  out.se_Lambda = unvec(sd.segment(at, l_size), fit.m, fit.n);
  return out;
}

}  // namespace matinar
