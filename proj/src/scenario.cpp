#include "matinar/scenario.hpp"

#include <stdexcept>

namespace matinar {

ModelParams scenario_a() {
  ModelParams params;
  params.m = 2;
  params.n = 2;
  params.p = 1;
  Matrix a_tilde(2, 2);
  a_tilde << 0.20, 0.40, 0.40, 0.20;
  params.A.push_back(a_tilde / a_tilde.norm());
  Matrix b(2, 2);
  b << 0.50, 0.30, 0.30, 0.50;
  params.B.push_back(b);
  params.Lambda = Matrix::Ones(2, 2);
  return params;
}

ModelParams scenario_by_name(const std::string& name) {
  if (name == "A" || name == "a") return scenario_a();
  if (name == "B" || name == "C" || name == "E" || name == "F" ||
      name == "b" || name == "c" || name == "e" || name == "f") {
    throw std::invalid_argument("scenario definition unavailable: " + name);
  }
  throw std::invalid_argument("unknown scenario: " + name);
}

ModelParams random_scenario(Eigen::Index m, Eigen::Index n, int p,
                            const Matrix& lambda, RngStream& rng) {
  if (m < 1 || n < 1 || p < 1) {
    throw std::invalid_argument("random_scenario: bad dimensions");
  }
  if (lambda.rows() != m || lambda.cols() != n) {
    throw std::invalid_argument("random_scenario: lambda shape mismatch");
  }
  ModelParams params;
  params.m = m;
  params.n = n;
  params.p = p;
  params.Lambda = lambda;
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    params.A.clear();
    params.B.clear();
    for (int l = 0; l < p; ++l) {
      Matrix a(m, m);
      for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) a(i, j) = rng.next_uniform();
      }
      a /= a.norm();
      Matrix b(n, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) b(i, j) = rng.next_uniform();
      }
      params.A.push_back(std::move(a));
      params.B.push_back(std::move(b));
    }
    if (check_stationary(params).stationary) return params;
  }
  throw std::domain_error("random_scenario: no stationary draw found");
}

}  // namespace matinar
