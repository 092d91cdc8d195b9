#include "matinar/process.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace matinar {

void ModelParams::validate() const {
  if (m < 1 || n < 1) throw std::invalid_argument("params: m, n must be >= 1");
  if (p < 1) throw std::invalid_argument("params: p must be >= 1");
  if (A.size() != static_cast<std::size_t>(p) ||
      B.size() != static_cast<std::size_t>(p)) {
    throw std::invalid_argument("params: need p coefficient matrices per side");
  }
  for (int l = 0; l < p; ++l) {
    if (A[l].rows() != m || A[l].cols() != m) {
      throw std::invalid_argument("params: A matrices must be m x m");
    }
    if (B[l].rows() != n || B[l].cols() != n) {
      throw std::invalid_argument("params: B matrices must be n x n");
    }
    if (!A[l].allFinite() || (A[l].array() < 0.0).any() ||
        (A[l].array() > 1.0).any()) {
      throw std::invalid_argument("params: A entries must lie in [0, 1]");
    }
    if (!B[l].allFinite() || (B[l].array() < 0.0).any() ||
        (B[l].array() > 1.0).any()) {
      throw std::invalid_argument("params: B entries must lie in [0, 1]");
    }
  }
  if (Lambda.rows() != m || Lambda.cols() != n) {
    throw std::invalid_argument("params: Lambda must be m x n");
  }
  if (!Lambda.allFinite() || (Lambda.array() < 0.0).any()) {
    throw std::invalid_argument("params: Lambda entries must be nonnegative");
  }
}

ModelParams ModelParams::feasible() const {
  ModelParams out = *this;
  for (int l = 0; l < p; ++l) {
    out.A[l] = A[l].cwiseMax(0.0).cwiseMin(1.0);
    out.B[l] = B[l].cwiseMax(0.0).cwiseMin(1.0);
    const double c = out.A[l].norm();
    if (c > 0.0) {
      out.A[l] /= c;  // unit norm keeps every entry within [0, 1]
      out.B[l] = (out.B[l] * c).cwiseMin(1.0).eval();
    }
  }
  out.Lambda = Lambda.cwiseMax(0.0);
  return out;
}

Matrix companion(const ModelParams& params) {
  return companion(params.A, params.B);
}

StationarityCheck check_stationary(const ModelParams& params) {
  StationarityCheck out;
  out.radius = spectral_radius(companion(params));
  out.stationary = out.radius < 1.0;
  return out;
}

InnovationSampler InnovationSampler::poisson(const Matrix& lambda) {
  if (!lambda.allFinite() || (lambda.array() < 0.0).any()) {
    throw std::invalid_argument("poisson innovations: mean must be nonnegative");
  }
  InnovationSampler s;
  s.mean_ = lambda;
  s.draw_ = [lambda](RngStream& rng) {
    CountMatrix out(lambda.rows(), lambda.cols());
    for (Eigen::Index j = 0; j < lambda.cols(); ++j) {
      for (Eigen::Index i = 0; i < lambda.rows(); ++i) {
        out(i, j) = rng.next_poisson(lambda(i, j));
      }
    }
    return out;
  };
  return s;
}

InnovationSampler InnovationSampler::from_table(std::vector<CountMatrix> atoms,
                                                std::vector<double> probs) {
  if (atoms.empty() || atoms.size() != probs.size()) {
    throw std::invalid_argument("pmf table: need matching nonempty atoms/probs");
  }
  double total = 0.0;
  Matrix mean = Matrix::Zero(atoms[0].rows(), atoms[0].cols());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].rows() != atoms[0].rows() ||
        atoms[i].cols() != atoms[0].cols()) {
      throw std::invalid_argument("pmf table: atoms must share one shape");
    }
    if ((atoms[i].array() < 0).any()) {
      throw std::invalid_argument("pmf table: atoms must be nonnegative");
    }
    if (!(probs[i] >= 0.0)) {
      throw std::invalid_argument("pmf table: probabilities must be nonnegative");
    }
    total += probs[i];
    mean += probs[i] * to_real(atoms[i]);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("pmf table: probabilities must sum to 1");
  }
  std::vector<double> cumulative(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cumulative.begin());
  cumulative.back() = 1.0;

  InnovationSampler s;
  s.mean_ = std::move(mean);
  s.draw_ = [atoms = std::move(atoms),
             cumulative = std::move(cumulative)](RngStream& rng) {
    const double u = rng.next_uniform();
    std::size_t idx = 0;
    while (idx + 1 < cumulative.size() && u >= cumulative[idx]) ++idx;
    return atoms[idx];
  };
  return s;
}

InnovationSampler InnovationSampler::custom(
    Matrix mean, std::function<CountMatrix(RngStream&)> draw) {
  InnovationSampler s;
  s.mean_ = std::move(mean);
  s.draw_ = std::move(draw);
  return s;
}

CountSeries simulate(const ModelParams& params, Eigen::Index T,
                     const SimulateOptions& opts,
                     const InnovationSampler& innovations, RngStream& rng) {
  params.validate();
  if (T < 1) throw std::invalid_argument("simulate: T must be >= 1");
  if (opts.burn_in < 0) throw std::invalid_argument("simulate: burn_in must be >= 0");
  if (innovations.mean().rows() != params.m ||
      innovations.mean().cols() != params.n) {
    throw std::invalid_argument("simulate: innovation shape mismatch");
  }
  if (!opts.force_nonstationary) {
    const auto check = check_stationary(params);
    if (!check.stationary) {
      throw std::invalid_argument(
          "simulate: companion spectral radius >= 1; pass force_nonstationary "
          "to override");
    }
  }

  std::vector<CountMatrix> lags(
      params.p, CountMatrix::Zero(params.m, params.n));
  CountSeries out;
  out.reserve(static_cast<std::size_t>(T));
  const Eigen::Index total = opts.burn_in + T;
  for (Eigen::Index t = 0; t < total; ++t) {
    CountMatrix y = innovations.draw(rng);
    for (int l = 0; l < params.p; ++l) {
      const CountMatrix thinned =
          right_thin(left_thin(params.A[l], lags[l], rng),
                     params.B[l].transpose(), rng);
      y += thinned;
    }
    for (int l = params.p - 1; l > 0; --l) lags[l] = lags[l - 1];
    lags[0] = y;
    if (t >= opts.burn_in) out.push_back(std::move(y));
  }
  return out;
}

CountSeries simulate(const ModelParams& params, Eigen::Index T,
                     Eigen::Index burn_in, std::uint64_t seed) {
  RngStream rng(seed);
  SimulateOptions opts;
  opts.burn_in = burn_in;
  return simulate(params, T, opts, InnovationSampler::poisson(params.Lambda),
                  rng);
}

Matrix conditional_mean(const ModelParams& params,
                        std::span<const CountMatrix> lags) {
  if (lags.size() < static_cast<std::size_t>(params.p)) {
    throw std::invalid_argument("conditional_mean: need at least p lags");
  }
  Matrix mean = params.Lambda;
  for (int l = 0; l < params.p; ++l) {
    mean += params.A[l] * to_real(lags[l]) * params.B[l].transpose();
  }
  return mean;
}

Matrix stationary_mean(const ModelParams& params) {
  const Eigen::Index d = params.m * params.n;
  Matrix system = Matrix::Identity(d, d);
  for (int l = 0; l < params.p; ++l) {
    system -= kron(params.B[l], params.A[l]);
  }
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) {
    throw std::domain_error("stationary_mean: singular system (non-stationary parameters)");
  }
  return unvec(lu.solve(vec(params.Lambda)), params.m, params.n);
}

namespace {

Matrix series_mean(const CountSeries& series) {
  Matrix mean = Matrix::Zero(series[0].rows(), series[0].cols());
  for (const auto& y : series) mean += to_real(y);
  return mean / static_cast<double>(series.size());
}

void check_series(const CountSeries& series, Eigen::Index min_len) {
  if (static_cast<Eigen::Index>(series.size()) < min_len) {
    throw std::invalid_argument("series too short");
  }
}

}  // namespace

Matrix empirical_autocov_kron(const CountSeries& series, Eigen::Index h) {
  const auto T = static_cast<Eigen::Index>(series.size());
  const Eigen::Index abs_h = h < 0 ? -h : h;
  check_series(series, abs_h + 1);
  const Matrix mean = series_mean(series);
  const Eigen::Index m = mean.rows();
  const Eigen::Index n = mean.cols();
  Matrix acc = Matrix::Zero(m * n, m * n);
  const Eigen::Index lo = h < 0 ? abs_h : 0;
  const Eigen::Index hi = h < 0 ? T : T - h;
  for (Eigen::Index t = lo; t < hi; ++t) {
    const Matrix lead = to_real(series[static_cast<std::size_t>(t + h)]) - mean;
    const Matrix trail = to_real(series[static_cast<std::size_t>(t)]) - mean;
    acc += kron(lead, trail.transpose());
  }
  return acc / static_cast<double>(T - abs_h);
}

ColumnRowAutocov column_row_autocov(const CountSeries& series,
                                    Eigen::Index h) {
  const Matrix gamma = empirical_autocov_kron(series, h);
  const Matrix t =
      transformation_matrix(series[0].rows(), series[0].cols());
  return ColumnRowAutocov{t * gamma, gamma * t};
}

CrossAcf cross_acf(const CountSeries& series, Eigen::Index max_lag) {
  const auto T = static_cast<Eigen::Index>(series.size());
  if (max_lag < 0 || max_lag >= T) {
    throw std::invalid_argument("cross_acf: max_lag must lie in [0, T)");
  }
  const Matrix mean = series_mean(series);
  const Eigen::Index m = mean.rows();
  const Eigen::Index n = mean.cols();
  const Matrix tmat = transformation_matrix(m, n);

  CrossAcf out;
  out.column_wise.reserve(static_cast<std::size_t>(max_lag) + 1);
  out.row_wise.reserve(static_cast<std::size_t>(max_lag) + 1);
  for (Eigen::Index h = 0; h <= max_lag; ++h) {
    const Eigen::Index window = T - h;
    // Entrywise standard deviations over the matched windows; with a shared
    // window and centering, Cauchy-Schwarz bounds every ratio by 1.
    Matrix sd_lead = Matrix::Zero(m, n);
    Matrix sd_trail = Matrix::Zero(m, n);
    for (Eigen::Index t = 0; t < window; ++t) {
      const Matrix lead = to_real(series[static_cast<std::size_t>(t + h)]) - mean;
      const Matrix trail = to_real(series[static_cast<std::size_t>(t)]) - mean;
      sd_lead += lead.cwiseAbs2();
      sd_trail += trail.cwiseAbs2();
    }
    sd_lead = (sd_lead / static_cast<double>(window)).cwiseSqrt();
    sd_trail = (sd_trail / static_cast<double>(window)).cwiseSqrt();
    if ((sd_lead.array() == 0.0).any() || (sd_trail.array() == 0.0).any()) {
      throw std::domain_error("cross_acf: zero-variance entry");
    }
    // The covariance entry at (u,v) pairs lead(i,j) with trail(l,k) exactly
    // as kron(lead, trail^T) does, so the matching normalizer is
    // kron(sd_lead, sd_trail^T) pushed through the same permutations.
    const Matrix gamma = empirical_autocov_kron(series, h);
    const Matrix denom = kron(sd_lead, sd_trail.transpose());
    out.column_wise.push_back(
        Matrix((tmat * gamma).cwiseQuotient(tmat * denom)));
    out.row_wise.push_back(Matrix((gamma * tmat).cwiseQuotient(denom * tmat)));
  }
  return out;
}

}  // namespace matinar
