#include "matinar/icls.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace matinar {
namespace {

std::vector<Matrix> real_series(const CountSeries& series) {
  std::vector<Matrix> out;
  out.reserve(series.size());
  for (const auto& y : series) out.push_back(to_real(y));
  return out;
}

// Right-divide by a symmetric PSD Gram matrix: numerator * gram^{-1}, with a
// relative eigenvalue cutoff when the Gram is rank deficient.
Matrix solve_gram(const Matrix& numerator, const Matrix& gram,
                  double rel_cutoff, bool* used_pinv) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector& vals = eig.eigenvalues();
  const double top = vals.cwiseAbs().maxCoeff();
  const double cutoff = top * rel_cutoff;
  Vector inv_vals = Vector::Zero(vals.size());
  bool truncated = false;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] > cutoff && vals[i] > 0.0) {
      inv_vals[i] = 1.0 / vals[i];
    } else {
      truncated = true;
    }
  }
  if (truncated && used_pinv != nullptr) *used_pinv = true;
  return numerator * eig.eigenvectors() * inv_vals.asDiagonal() *
         eig.eigenvectors().transpose();
}

double objective_impl(const std::vector<Matrix>& y, int p,
                      const std::vector<Matrix>& A,
                      const std::vector<Matrix>& B, const Matrix& lambda) {
  const auto T = static_cast<Eigen::Index>(y.size());
  double acc = 0.0;
  for (Eigen::Index t = p; t < T; ++t) {
    Matrix resid = y[static_cast<std::size_t>(t)] - lambda;
    for (int l = 0; l < p; ++l) {
      resid -= A[l] * y[static_cast<std::size_t>(t - 1 - l)] * B[l].transpose();
    }
    acc += resid.squaredNorm();
  }
  return acc;
}

}  // namespace

ModelParams IclsFit::params() const {
  ModelParams out;
  out.m = m;
  out.n = n;
  out.p = p;
  out.A = A;
  out.B = B;
  out.Lambda = Lambda;
  return out;
}

double icls_objective(const ModelParams& params, const CountSeries& series) {
  return objective_impl(real_series(series), params.p, params.A, params.B,
                        params.Lambda);
}

IclsFit icls_fit(const CountSeries& series, int p, const ProjFit& init,
                 const IclsOptions& opts) {
  if (p < 1) throw std::invalid_argument("icls: p must be >= 1");
  if (init.p != p) throw std::invalid_argument("icls: init order mismatch");
  const auto T = static_cast<Eigen::Index>(series.size());
  if (T <= p) throw std::invalid_argument("icls: series shorter than p + 1");

  const std::vector<Matrix> y = real_series(series);
  const double t_eff = static_cast<double>(T - p);

  IclsFit fit;
  fit.m = init.m;
  fit.n = init.n;
  fit.p = p;
  fit.A = init.A;
  fit.B = init.B;
  fit.Lambda = init.Lambda;
  fit.condition_number = init.condition_number;
  fit.residual_count = T - p;

  fit.objective_trace.push_back(objective_impl(y, p, fit.A, fit.B, fit.Lambda));

  std::vector<Matrix> prev_A = fit.A;
  std::vector<Matrix> prev_B = fit.B;
  Matrix prev_lambda = fit.Lambda;

  // Full residuals Y_t - sum_l A_l Y_{t-l} B_l^T - Lambda, maintained
  // incrementally: each block update adds its old contribution back and
  // subtracts the new one, keeping a sweep at O(p*T) matrix products.
  std::vector<Matrix> resid(static_cast<std::size_t>(T - p));

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (Eigen::Index t = p; t < T; ++t) {
      Matrix r = y[static_cast<std::size_t>(t)] - fit.Lambda;
      for (int k = 0; k < p; ++k) {
        r.noalias() -= fit.A[k] * y[static_cast<std::size_t>(t - 1 - k)] *
                       fit.B[k].transpose();
      }
      resid[static_cast<std::size_t>(t - p)] = std::move(r);
    }

    for (int l = 0; l < p; ++l) {
      Matrix cross_a = Matrix::Zero(fit.m, fit.m);
      Matrix gram_a = Matrix::Zero(fit.m, fit.m);
      for (Eigen::Index t = p; t < T; ++t) {
        Matrix& r = resid[static_cast<std::size_t>(t - p)];
        const Matrix& ylag = y[static_cast<std::size_t>(t - 1 - l)];
        const Matrix yb = ylag * fit.B[l].transpose();  // = (B_l Y^T)^T
        r.noalias() += fit.A[l] * yb;                   // drop lag l
        cross_a.noalias() += r * yb.transpose();
        gram_a.noalias() += yb * yb.transpose();
      }
      fit.A[l] = solve_gram(cross_a, gram_a, opts.sv_cutoff, &fit.gram_warning);

      Matrix cross_b = Matrix::Zero(fit.n, fit.n);
      Matrix gram_b = Matrix::Zero(fit.n, fit.n);
      for (Eigen::Index t = p; t < T; ++t) {
        Matrix& r = resid[static_cast<std::size_t>(t - p)];
        const Matrix& ylag = y[static_cast<std::size_t>(t - 1 - l)];
        const Matrix ay = fit.A[l] * ylag;  // residual still excludes lag l
        cross_b.noalias() += r.transpose() * ay;
        gram_b.noalias() += ay.transpose() * ay;
      }
      fit.B[l] = solve_gram(cross_b, gram_b, opts.sv_cutoff, &fit.gram_warning);

      for (Eigen::Index t = p; t < T; ++t) {
        Matrix& r = resid[static_cast<std::size_t>(t - p)];
        const Matrix& ylag = y[static_cast<std::size_t>(t - 1 - l)];
        r.noalias() -= fit.A[l] * ylag * fit.B[l].transpose();
      }
    }

    Matrix lambda_acc = Matrix::Zero(fit.m, fit.n);
    for (const Matrix& r : resid) lambda_acc += r;
    const Matrix lambda_shift = lambda_acc / t_eff;
    fit.Lambda += lambda_shift;
    double objective = 0.0;
    for (Matrix& r : resid) {
      r -= lambda_shift;
      objective += r.squaredNorm();
    }

    // Per-sweep gauge fix; leaves the objective unchanged.
    for (int l = 0; l < p; ++l) {
      const double c = fit.A[l].norm();
      if (c > 0.0) {
        fit.A[l] /= c;
        fit.B[l] *= c;
      }
    }

    fit.objective_trace.push_back(objective);
    fit.sweeps = sweep;

    double change = (fit.Lambda - prev_lambda).norm();
    for (int l = 0; l < p; ++l) {
      change = std::max(change, (fit.A[l] - prev_A[l]).norm());
      change = std::max(change, (fit.B[l] - prev_B[l]).norm());
    }
    prev_A = fit.A;
    prev_B = fit.B;
    prev_lambda = fit.Lambda;

    if (change < opts.tol) {
      fit.converged = true;
      break;
    }
  }

  // Final gauge: flip the sign so each A has a nonnegative entry sum,
  // matching the projection estimator's convention.
  for (int l = 0; l < p; ++l) {
    if (fit.A[l].sum() < 0.0) {
      fit.A[l] = -fit.A[l];
      fit.B[l] = -fit.B[l];
    }
  }
  return fit;
}

IclsSe icls_standard_errors(const IclsFit& fit, const CountSeries& series,
                            const IclsOptions& opts) {
  const auto T = static_cast<Eigen::Index>(series.size());
  const int p = fit.p;
  if (T <= p) throw std::invalid_argument("icls se: series shorter than p + 1");
  const Eigen::Index m = fit.m;
  const Eigen::Index n = fit.n;
  const Eigen::Index d = m * n;
  const Eigen::Index a_size = m * m;
  const Eigen::Index b_size = n * n;
  const Eigen::Index dim = p * (a_size + b_size) + d;
  const double t_eff = static_cast<double>(T - p);
  const std::vector<Matrix> y = real_series(series);
  const Matrix identity_m = Matrix::Identity(m, m);
  const Matrix identity_n = Matrix::Identity(n, n);

  Matrix q = Matrix::Zero(dim, dim);
  Matrix middle = Matrix::Zero(dim, dim);
  Matrix sigma_pooled = Matrix::Zero(d, d);
  std::vector<Matrix> pt_list;
  if (!opts.sandwich_middle) pt_list.reserve(static_cast<std::size_t>(T - p));

  Matrix pt(dim, d);  // P_t, parameter blocks by rows
  for (Eigen::Index t = p; t < T; ++t) {
    Eigen::Index at = 0;
    for (int l = 0; l < p; ++l) {
      const Matrix& ylag = y[static_cast<std::size_t>(t - 1 - l)];
      pt.middleRows(at, a_size) =
          kron(fit.B[l] * ylag.transpose(), identity_m).transpose();
      // vec(B^T) column order: the SEs are mapped back entrywise below.
      pt.middleRows(at + a_size, b_size) =
          kron(identity_n, fit.A[l] * ylag).transpose();
      at += a_size + b_size;
    }
    pt.middleRows(at, d) = Matrix::Identity(d, d);

    q.noalias() += pt * pt.transpose();
    Matrix resid = y[static_cast<std::size_t>(t)] - fit.Lambda;
    for (int l = 0; l < p; ++l) {
      resid -= fit.A[l] * y[static_cast<std::size_t>(t - 1 - l)] *
               fit.B[l].transpose();
    }
    const Vector u = vec(resid);
    if (opts.sandwich_middle) {
      const Vector pu = pt * u;
      middle.noalias() += pu * pu.transpose();
    } else {
      sigma_pooled.noalias() += u * u.transpose();
      pt_list.push_back(pt);
    }
  }
  q /= t_eff;
  if (opts.sandwich_middle) {
    middle /= t_eff;
  } else {
    const Eigen::Index sigma_dof = T - d - p;
    if (sigma_dof < 1) throw std::domain_error("icls se: series too short");
    sigma_pooled /= static_cast<double>(sigma_dof);
    for (const auto& stored : pt_list) {
      middle.noalias() += stored * sigma_pooled * stored.transpose();
    }
    middle /= t_eff;
  }

  // Gauge augmentation: one rank-1 term per lag, vec(A_l) in its A slot.
  for (int l = 0; l < p; ++l) {
    Vector gamma = Vector::Zero(dim);
    gamma.segment(l * (a_size + b_size), a_size) = vec(fit.A[l]);
    q.noalias() += gamma * gamma.transpose();
  }

  Eigen::FullPivLU<Matrix> lu(q);
  if (!lu.isInvertible()) {
    throw std::domain_error("icls se: singular Q matrix");
  }
  const Matrix q_inv = lu.inverse();
  const Matrix xi2 = q_inv * middle * q_inv;

  IclsSe out;
  out.se = (xi2.diagonal() / t_eff).cwiseMax(0.0).cwiseSqrt();
  Eigen::Index at = 0;
  for (int l = 0; l < p; ++l) {
    out.se_A.push_back(unvec(out.se.segment(at, a_size), m, m));
    // B block entries arrive row-major (vec of B^T).
    Matrix se_b(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        se_b(i, j) = out.se[at + a_size + i * n + j];
      }
    }
    out.se_B.push_back(std::move(se_b));
    at += a_size + b_size;
  }
  out.se_Lambda = unvec(out.se.segment(at, d), m, n);
  return out;
}

}  // namespace matinar
