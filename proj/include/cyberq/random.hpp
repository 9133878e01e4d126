#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

namespace cyberq {

// Seeded random stream with a fixed consumption contract: every draw costs
// exactly one engine call, so trajectories are bit-reproducible across
// platforms and unaffected by optional logging.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1), 53-bit resolution, one engine call.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform index in [0, n). One engine call. n must be > 0.
  std::size_t next_index(std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(next_unit() * static_cast<double>(n)));
  }

  // True with probability p. One engine call.
  bool next_bernoulli(double p) { return next_unit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cyberq
