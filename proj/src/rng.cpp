#include "matinar/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace matinar {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b =
      splitmix64(seed ^ (stream * 0x632BE59BD9B4E019ULL + 0xD1342543DE82EF95ULL));
  return a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix_seed(seed, stream)) {}

double RngStream::next_uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::int64_t RngStream::next_binomial(std::int64_t count, double prob) {
  if (count < 0) {
    throw std::invalid_argument("binomial count must be nonnegative");
  }
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::invalid_argument("binomial probability outside [0, 1]");
  }
  if (count == 0 || prob == 0.0) return 0;
  if (prob == 1.0) return count;
  if (prob > 0.5) return count - next_binomial(count, 1.0 - prob);

  constexpr std::int64_t kDirectLimit = 32;
  if (count < kDirectLimit) {
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < count; ++i) {
      if (next_uniform() < prob) ++hits;
    }
    return hits;
  }

  // Inverse-CDF walk; prob <= 0.5 keeps the starting pmf representable for
  // any count seen in practice.
  double pmf = std::exp(static_cast<double>(count) * std::log1p(-prob));
  if (pmf <= 0.0) {
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < count; ++i) {
      if (next_uniform() < prob) ++hits;
    }
    return hits;
  }
  const double ratio = prob / (1.0 - prob);
  double u = next_uniform();
  double cdf = pmf;
  std::int64_t k = 0;
  while (u > cdf && k < count) {
    pmf *= ratio * static_cast<double>(count - k) / static_cast<double>(k + 1);
    ++k;
    cdf += pmf;
  }
  return k;
}

std::int64_t RngStream::next_poisson(double mean) {
  if (!(mean >= 0.0)) {
    throw std::invalid_argument("poisson mean must be nonnegative");
  }
  if (mean == 0.0) return 0;
  constexpr double kDirectLimit = 30.0;
  if (mean > kDirectLimit) {
    // Split by infinite divisibility to keep exp(-mean) representable.
    const double half = mean / 2.0;
    return next_poisson(half) + next_poisson(mean - half);
  }
  const double threshold = std::exp(-mean);
  std::int64_t k = 0;
  double prod = next_uniform();
  while (prod > threshold) {
    ++k;
    prod *= next_uniform();
  }
  return k;
}

RngStream RngStream::substream(std::uint64_t id) const {
  const std::uint64_t derived =
      splitmix64(stream_ ^ (0x9E3779B97F4A7C15ULL * (id + 1)));
  return RngStream(seed_, derived);
}

}  // namespace matinar
