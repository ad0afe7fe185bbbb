#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace calr {

// Portable random source. The bit stream is std::mt19937_64 (fully specified
// by the standard); uniform reals take the top 53 bits, integers use
// rejection sampling, and normals use the Box-Muller transform. None of the
// implementation-defined <random> distributions are used, so a seed yields
// the same numbers on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller; caches the second variate.
  double normal();

  // k distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace calr
