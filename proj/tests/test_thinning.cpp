#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "matinar/thinning.hpp"

using namespace matinar;

namespace {

CountMatrix fixed_counts() {
  CountMatrix y(2, 3);
  y << 4, 0, 7, 2, 9, 1;
  return y;
}

}  // namespace

TEST_CASE("binomial thinning boundary probabilities") {
  RngStream rng(1);
  CHECK(binomial_thin(0.0, 7, rng) == 0);
  CHECK(binomial_thin(1.0, 7, rng) == 7);
  CHECK(binomial_thin(0.3, 0, rng) == 0);
  CHECK_THROWS_AS(binomial_thin(1.5, 3, rng), std::invalid_argument);
  CHECK_THROWS_AS(binomial_thin(-0.1, 3, rng), std::invalid_argument);
  CHECK_THROWS_AS(binomial_thin(0.5, -1, rng), std::invalid_argument);
}

TEST_CASE("binomial thinning moments") {
  RngStream rng(2);
  const int draws = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double value = static_cast<double>(binomial_thin(0.5, 10, rng));
    sum += value;
    sum_sq += value * value;
  }
  const double mean = sum / draws;
  const double variance = sum_sq / draws - mean * mean;
  CHECK(mean == doctest::Approx(5.0).epsilon(0.01));       // 5 +/- 0.05
  CHECK(variance == doctest::Approx(2.5).epsilon(0.04));   // 2.5 +/- 0.1
}

TEST_CASE("binomial sampler is consistent across the pmf-walk switch") {
  // Count 40 goes through the inverse-CDF path, count 20 through direct
  // summation; both must match Binomial moments.
  for (const std::int64_t count : {20LL, 40LL, 200LL}) {
    RngStream rng(static_cast<std::uint64_t>(count));
    const double prob = 0.37;
    const int draws = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double v = static_cast<double>(rng.next_binomial(count, prob));
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / draws;
    const double variance = sum_sq / draws - mean * mean;
    const double c = static_cast<double>(count);
    CHECK(mean == doctest::Approx(c * prob).epsilon(0.01));
    CHECK(variance == doctest::Approx(c * prob * (1 - prob)).epsilon(0.05));
  }
}

TEST_CASE("left thinning with 0/1 matrices") {
  RngStream rng(3);
  const CountMatrix y = fixed_counts();
  const CountMatrix kept = left_thin(Matrix::Identity(2, 2), y, rng);
  CHECK((kept - y).cwiseAbs().maxCoeff() == 0);
  const CountMatrix zero = left_thin(Matrix::Zero(2, 2), y, rng);
  CHECK(zero.cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("right thinning with identity") {
  RngStream rng(4);
  const CountMatrix y = fixed_counts();
  const CountMatrix kept = right_thin(y, Matrix::Identity(3, 3), rng);
  CHECK((kept - y).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("thinning validates inputs") {
  RngStream rng(5);
  const CountMatrix y = fixed_counts();
  Matrix bad = Matrix::Constant(2, 2, 1.5);
  CHECK_THROWS_AS(left_thin(bad, y, rng), std::invalid_argument);
  CHECK_THROWS_AS(left_thin(Matrix::Identity(3, 3), y, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(right_thin(y, Matrix::Identity(2, 2), rng),
                  std::invalid_argument);
  CountMatrix negative = y;
  negative(0, 0) = -1;
  CHECK_THROWS_AS(left_thin(Matrix::Identity(2, 2), negative, rng),
                  std::invalid_argument);
}

TEST_CASE("left thinning mean matches the matrix product") {
  RngStream rng(6);
  Matrix a(2, 2);
  a << 0.3, 0.7, 0.55, 0.1;
  const CountMatrix y = fixed_counts();
  const int draws = 100000;
  Matrix mean = Matrix::Zero(2, 3);
  for (int i = 0; i < draws; ++i) {
    mean += to_real(left_thin(a, y, rng));
  }
  mean /= draws;
  const Matrix expected = a * to_real(y);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      // Entry variance <= sum_k a(1-a) y <= sum_k y / 4.
      const double se = std::sqrt(to_real(y).col(j).sum() / 4.0 / draws);
      CHECK(std::abs(mean(i, j) - expected(i, j)) < 3.0 * se + 1e-9);
    }
  }
}

TEST_CASE("right thinning mean matches the matrix product") {
  RngStream rng(7);
  Matrix b(3, 3);
  b << 0.2, 0.5, 0.9, 0.4, 0.15, 0.6, 0.8, 0.35, 0.05;
  const CountMatrix y = fixed_counts();
  const int draws = 100000;
  Matrix mean = Matrix::Zero(2, 3);
  for (int i = 0; i < draws; ++i) {
    mean += to_real(right_thin(y, b, rng));
  }
  mean /= draws;
  const Matrix expected = to_real(y) * b;
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      const double se = std::sqrt(to_real(y).row(i).sum() / 4.0 / draws);
      CHECK(std::abs(mean(i, j) - expected(i, j)) < 3.0 * se + 1e-9);
    }
  }
}

TEST_CASE("composite thinning mean is the sandwich product") {
  RngStream rng(8);
  Matrix a(2, 2);
  a << 0.3, 0.7, 0.55, 0.1;
  Matrix b(3, 3);
  b << 0.2, 0.5, 0.9, 0.4, 0.15, 0.6, 0.8, 0.35, 0.05;
  const CountMatrix y = fixed_counts();
  const int draws = 100000;
  Matrix mean = Matrix::Zero(2, 3);
  for (int i = 0; i < draws; ++i) {
    mean += to_real(right_thin(left_thin(a, y, rng), b.transpose(), rng));
  }
  mean /= draws;
  const Matrix expected = a * to_real(y) * b.transpose();
  const double total = static_cast<double>(y.sum());
  const double se = std::sqrt(total / 4.0 / draws);
  CHECK((mean - expected).cwiseAbs().maxCoeff() < 3.5 * se + 1e-9);
}

TEST_CASE("thinned entries never exceed the reachable source counts") {
  RngStream rng(9);
  Matrix a(2, 2);
  a << 1.0, 1.0, 1.0, 1.0;
  const CountMatrix y = fixed_counts();
  for (int i = 0; i < 200; ++i) {
    const CountMatrix thinned = left_thin(a, y, rng);
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      CHECK(thinned.col(c).maxCoeff() <= y.col(c).sum());
      CHECK(thinned.col(c).minCoeff() >= 0);
    }
  }
}

TEST_CASE("cascaded thinning matches a single thinning in moments") {
  // Binomial(Binomial(y, a), b) has the Binomial(y, ab) distribution; check
  // mean a*b*y and variance ab(1-ab)y against a single-stream draw.
  RngStream cascade_rng(10);
  RngStream single_rng(11);
  const double a = 0.7, b = 0.6;
  const std::int64_t y = 12;
  const int draws = 200000;
  double c_sum = 0, c_sq = 0, s_sum = 0, s_sq = 0;
  for (int i = 0; i < draws; ++i) {
    const double c =
        static_cast<double>(binomial_thin(b, binomial_thin(a, y, cascade_rng),
                                          cascade_rng));
    const double s = static_cast<double>(binomial_thin(a * b, y, single_rng));
    c_sum += c;
    c_sq += c * c;
    s_sum += s;
    s_sq += s * s;
  }
  const double yd = static_cast<double>(y);
  const double expect_mean = a * b * yd;
  const double expect_var = a * b * (1 - a * b) * yd;
  const double c_mean = c_sum / draws;
  const double s_mean = s_sum / draws;
  CHECK(c_mean == doctest::Approx(expect_mean).epsilon(0.01));
  CHECK(s_mean == doctest::Approx(expect_mean).epsilon(0.01));
  CHECK(c_sq / draws - c_mean * c_mean ==
        doctest::Approx(expect_var).epsilon(0.03));
  CHECK(s_sq / draws - s_mean * s_mean ==
        doctest::Approx(expect_var).epsilon(0.03));
}

TEST_CASE("thinning is reproducible for a fixed seed") {
  Matrix a(2, 2);
  a << 0.3, 0.7, 0.55, 0.1;
  const CountMatrix y = fixed_counts();
  RngStream rng1(123, 7);
  RngStream rng2(123, 7);
  for (int i = 0; i < 20; ++i) {
    const CountMatrix first = left_thin(a, y, rng1);
    const CountMatrix second = left_thin(a, y, rng2);
    CHECK((first - second).cwiseAbs().maxCoeff() == 0);
  }
  RngStream other(123, 8);
  bool any_diff = false;
  for (int i = 0; i < 20; ++i) {
    RngStream base(123, 7);
    if ((left_thin(a, y, other) - left_thin(a, y, base)).cwiseAbs().maxCoeff() != 0) {
      any_diff = true;
    }
  }
  CHECK(any_diff);
}

TEST_CASE("poisson sampler moments and determinism") {
  RngStream rng(12);
  const double lambda = 4.2;
  const int draws = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < draws; ++i) {
    const double v = static_cast<double>(rng.next_poisson(lambda));
    sum += v;
    sq += v * v;
  }
  const double mean = sum / draws;
  CHECK(mean == doctest::Approx(lambda).epsilon(0.01));
  CHECK(sq / draws - mean * mean == doctest::Approx(lambda).epsilon(0.03));

  // The split recursion handles large means.
  RngStream big(13);
  double big_sum = 0;
  for (int i = 0; i < 20000; ++i) {
    big_sum += static_cast<double>(big.next_poisson(90.0));
  }
  CHECK(big_sum / 20000 == doctest::Approx(90.0).epsilon(0.01));

  RngStream r1(7, 1), r2(7, 1);
  for (int i = 0; i < 100; ++i) {
    CHECK(r1.next_poisson(3.3) == r2.next_poisson(3.3));
  }
}
