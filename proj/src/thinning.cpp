#include "matinar/thinning.hpp"

#include <stdexcept>

namespace matinar {
namespace {

void check_probabilities(const Matrix& a, const char* name) {
  if (!a.allFinite() || (a.array() < 0.0).any() || (a.array() > 1.0).any()) {
    throw std::invalid_argument(std::string(name) +
                                ": entries must lie in [0, 1]");
  }
}

void check_counts(const CountMatrix& y) {
  if ((y.array() < 0).any()) {
    throw std::invalid_argument("thinning: counts must be nonnegative");
  }
}

}  // namespace

std::int64_t binomial_thin(double a, std::int64_t y, RngStream& rng) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw std::invalid_argument("binomial_thin: probability outside [0, 1]");
  }
  if (y < 0) {
    throw std::invalid_argument("binomial_thin: count must be nonnegative");
  }
  return rng.next_binomial(y, a);
}

CountMatrix left_thin(const Matrix& a, const CountMatrix& y, RngStream& rng) {
  if (a.rows() != a.cols() || a.cols() != y.rows()) {
    throw std::invalid_argument("left_thin: A must be square with A.cols == Y.rows");
  }
  check_probabilities(a, "left_thin");
  check_counts(y);
  CountMatrix out = CountMatrix::Zero(y.rows(), y.cols());
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      std::int64_t acc = 0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) {
        acc += rng.next_binomial(y(k, j), a(i, k));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

CountMatrix right_thin(const CountMatrix& y, const Matrix& b, RngStream& rng) {
  if (b.rows() != b.cols() || y.cols() != b.rows()) {
    throw std::invalid_argument("right_thin: B must be square with Y.cols == B.rows");
  }
  check_probabilities(b, "right_thin");
  check_counts(y);
  CountMatrix out = CountMatrix::Zero(y.rows(), y.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      std::int64_t acc = 0;
      for (Eigen::Index k = 0; k < b.rows(); ++k) {
        acc += rng.next_binomial(y(i, k), b(k, j));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

}  // namespace matinar
