#include "matinar/forecast.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace matinar {

ForecastPath forecast(const ModelParams& params,
                      std::span<const CountMatrix> history, int horizon) {
  if (horizon < 1) throw std::invalid_argument("forecast: horizon must be >= 1");
  if (history.size() < static_cast<std::size_t>(params.p)) {
    throw std::invalid_argument("forecast: need at least p observations");
  }
  // state[0] is the most recent value (observation or prior forecast).
  std::deque<Matrix> state;
  for (int l = 0; l < params.p; ++l) {
    state.push_back(to_real(history[history.size() - 1 - l]));
  }
  ForecastPath path;
  path.horizon = horizon;
  path.values.reserve(static_cast<std::size_t>(horizon));
  for (int h = 1; h <= horizon; ++h) {
    Matrix next = params.Lambda;
    for (int l = 0; l < params.p; ++l) {
      next += params.A[l] * state[static_cast<std::size_t>(l)] *
              params.B[l].transpose();
    }
    state.push_front(next);
    state.pop_back();
    path.values.push_back(std::move(next));
  }
  return path;
}

CountMatrix round_forecast(const Matrix& value, RoundingMode mode) {
  CountMatrix out(value.rows(), value.cols());
  for (Eigen::Index j = 0; j < value.cols(); ++j) {
    for (Eigen::Index i = 0; i < value.rows(); ++i) {
      double v = value(i, j);
      switch (mode) {
        case RoundingMode::nearest:
          v = std::round(v);
          break;
        case RoundingMode::floor:
          v = std::floor(v);
          break;
        case RoundingMode::none:
          break;
      }
      out(i, j) = static_cast<std::int64_t>(std::max(v, 0.0));
    }
  }
  return out;
}

Matrix residual_matrix(const ModelParams& params, const CountSeries& series) {
  const auto T = static_cast<Eigen::Index>(series.size());
  const int p = params.p;
  if (T <= p) throw std::invalid_argument("residuals: series shorter than p + 1");
  Matrix out(T - p, params.m * params.n);
  for (Eigen::Index t = p; t < T; ++t) {
    Matrix resid = to_real(series[static_cast<std::size_t>(t)]) - params.Lambda;
    for (int l = 0; l < p; ++l) {
      resid -= params.A[l] * to_real(series[static_cast<std::size_t>(t - 1 - l)]) *
               params.B[l].transpose();
    }
    out.row(t - p) = vec(resid).transpose();
  }
  return out;
}

double mrss(const ModelParams& params, const CountSeries& series) {
  const auto T = static_cast<Eigen::Index>(series.size());
  const int p = params.p;
  if (T <= p) throw std::invalid_argument("mrss: series shorter than p + 1");
  double acc = 0.0;
  for (Eigen::Index t = p; t < T; ++t) {
    Matrix resid = to_real(series[static_cast<std::size_t>(t)]) - params.Lambda;
    for (int l = 0; l < p; ++l) {
      resid -= params.A[l] * to_real(series[static_cast<std::size_t>(t - 1 - l)]) *
               params.B[l].transpose();
    }
    acc += resid.norm();
  }
  return acc / static_cast<double>(T);  // normalizer is T, not T - p
}

std::vector<double> cmpe(const ModelParams& params, const CountSeries& series,
                         Eigen::Index origin, int horizon) {
  const auto T = static_cast<Eigen::Index>(series.size());
  if (origin < params.p) {
    throw std::invalid_argument("cmpe: origin must provide at least p observations");
  }
  if (origin + horizon > T) {
    throw std::invalid_argument("cmpe: horizon exceeds available data");
  }
  const ForecastPath path = forecast(
      params,
      std::span<const CountMatrix>(series.data(),
                                   static_cast<std::size_t>(origin)),
      horizon);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  double acc = 0.0;
  for (int h = 1; h <= horizon; ++h) {
    const Matrix err =
        path.values[static_cast<std::size_t>(h - 1)] -
        to_real(series[static_cast<std::size_t>(origin + h - 1)]);
    acc += err.norm();
    out.push_back(acc / static_cast<double>(h));
  }
  return out;
}

double mspe(const ModelParams& params, const CountSeries& series,
            Eigen::Index origin, int horizon) {
  return cmpe(params, series, origin, horizon).back();
}

namespace {

// Regularized lower incomplete gamma P(a, x), series + continued fraction.
double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma_a);
  }
  // Lentz continued fraction for Q(a, x).
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double frac = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    frac *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  const double q = std::exp(-x + a * std::log(x) - log_gamma_a) * frac;
  return 1.0 - q;
}

}  // namespace

double chi_squared_cdf(double x, double dof) {
  if (dof <= 0.0) throw std::invalid_argument("chi_squared_cdf: dof must be > 0");
  if (x <= 0.0) return 0.0;
  return gamma_p(dof / 2.0, x / 2.0);
}

std::vector<PortmanteauEntry> portmanteau(const Matrix& residuals,
                                          int max_delay) {
  const Eigen::Index T = residuals.rows();
  const Eigen::Index dim = residuals.cols();
  if (max_delay < 1) throw std::invalid_argument("portmanteau: need max_delay >= 1");
  if (T <= max_delay + 1) {
    throw std::invalid_argument("portmanteau: series too short for requested delay");
  }
  const Matrix centered =
      residuals.rowwise() - residuals.colwise().mean();

  const Matrix c0 =
      centered.transpose() * centered / static_cast<double>(T);
  Eigen::FullPivLU<Matrix> lu(c0);
  if (!lu.isInvertible()) {
    throw std::domain_error("portmanteau: singular lag-0 covariance");
  }
  const Matrix c0_inv = lu.inverse();

  std::vector<PortmanteauEntry> out;
  out.reserve(static_cast<std::size_t>(max_delay));
  double cumulative = 0.0;
  const double t_real = static_cast<double>(T);
  for (int h = 1; h <= max_delay; ++h) {
    Matrix ch = Matrix::Zero(dim, dim);
    for (Eigen::Index t = h; t < T; ++t) {
      ch.noalias() += centered.row(t).transpose() * centered.row(t - h);
    }
    ch /= t_real;
    cumulative += (ch.transpose() * c0_inv * ch * c0_inv).trace() /
                  (t_real - static_cast<double>(h));
    const double stat = t_real * t_real * cumulative;
    const double dof = static_cast<double>(dim * dim) * static_cast<double>(h);
    out.push_back({h, stat, 1.0 - chi_squared_cdf(stat, dof)});
  }
  return out;
}

}  // namespace matinar
