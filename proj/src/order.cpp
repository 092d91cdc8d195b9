#include "matinar/order.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

namespace matinar {
namespace {

constexpr double kLogFloor = 1e-300;

struct CandidateFit {
  double ic1 = 0.0;
  bool degenerate = false;
  bool converged = true;
  int sweeps = 0;
};

CandidateFit fit_candidate(const CountSeries& series, int p_tilde,
                           FitMethod method, const IclsOptions& opts) {
  CandidateFit out;
  ModelParams fitted;
  if (method == FitMethod::proj) {
    fitted = proj_fit(series, p_tilde).params();
  } else {
    const ProjFit init = proj_fit(series, p_tilde);
    const IclsFit fit = icls_fit(series, p_tilde, init, opts);
    out.converged = fit.converged;
    out.sweeps = fit.sweeps;
    fitted = fit.params();
  }
  const auto T = static_cast<double>(series.size());
  double rss = icls_objective(fitted, series) / T;
  if (rss < kLogFloor) {
    rss = kLogFloor;
    out.degenerate = true;
  }
  out.ic1 = std::log(rss) +
            static_cast<double>(p_tilde) * std::log(T) / T;
  return out;
}

}  // namespace

double ic1_from_params(const CountSeries& series, const ModelParams& params) {
  const auto T = static_cast<double>(series.size());
  const double rss =
      std::max(icls_objective(params, series) / T, kLogFloor);
  return std::log(rss) + static_cast<double>(params.p) * std::log(T) / T;
}

double ic1(const CountSeries& series, int p_tilde, FitMethod method,
           const IclsOptions& opts) {
  return fit_candidate(series, p_tilde, method, opts).ic1;
}

OrderSelection select_order(const CountSeries& series, int p_bar,
                            FitMethod method, int jobs,
                            const IclsOptions& opts) {
  if (p_bar < 1) throw std::invalid_argument("select_order: p_bar must be >= 1");

  std::vector<CandidateFit> fits(static_cast<std::size_t>(p_bar));
  if (jobs > 1 && p_bar > 1) {
    std::vector<std::future<CandidateFit>> futures;
    futures.reserve(fits.size());
    for (int p = 1; p <= p_bar; ++p) {
      futures.push_back(std::async(std::launch::async, fit_candidate,
                                   std::cref(series), p, method,
                                   std::cref(opts)));
    }
    for (int p = 1; p <= p_bar; ++p) {
      fits[static_cast<std::size_t>(p - 1)] = futures[static_cast<std::size_t>(p - 1)].get();
    }
  } else {
    for (int p = 1; p <= p_bar; ++p) {
      fits[static_cast<std::size_t>(p - 1)] =
          fit_candidate(series, p, method, opts);
    }
  }

  OrderSelection out;
  out.p_bar = p_bar;
  out.p_hat = 1;
  for (int p = 1; p <= p_bar; ++p) {
    const auto& fit = fits[static_cast<std::size_t>(p - 1)];
    out.ic_values.push_back(fit.ic1);
    out.candidates.push_back(
        {p, fit.ic1, fit.degenerate, fit.converged, fit.sweeps});
    // Strict comparison ties break toward the smaller order.
    if (fit.ic1 < out.ic_values[static_cast<std::size_t>(out.p_hat - 1)]) {
      out.p_hat = p;
    }
  }
  return out;
}

}  // namespace matinar
