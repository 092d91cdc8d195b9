#pragma once

#include <cstdint>
#include <random>

namespace matinar {

/// Deterministic random stream: a seeded mt19937_64 engine plus hand-rolled
/// count samplers, so a given (seed, stream) pair reproduces the same draw
/// sequence on every platform. Independent replications should each own a
/// stream derived via substream().
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Uniform double in [0, 1).
  double next_uniform();

  /// Binomial(count, prob) draw: Bernoulli summation for small counts,
  /// inverse-CDF walk otherwise.
  std::int64_t next_binomial(std::int64_t count, double prob);

  /// Poisson(mean) draw.
  std::int64_t next_poisson(double mean);

  /// Independent stream derived from the same root seed.
  RngStream substream(std::uint64_t id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace matinar
