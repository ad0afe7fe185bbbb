#pragma once

#include "calr/dataset.hpp"
#include "calr/model_io.hpp"

#include <cstddef>
#include <cstdint>
#include <utility>

namespace calr {

struct GeneratorConfig {
  std::size_t n = 0;
  std::size_t d = 1;
  std::size_t m = 0;
  double sigma = 0.0;
  double delta = 0.5;
  std::uint64_t seed = 0;
};

// Side length of the feature domain [0, L]^d.
inline constexpr double kGeneratorDomain = 10.0;

// Plants m axis-aligned boxes inside [0, 10]^d, pairwise separated along some
// axis by at least one side length, and m + 1 linear functions with pairwise
// coefficient distance >= delta. Each box gets floor(n / (m + 1)) points drawn
// uniformly inside it; the rest are drawn uniformly from the domain outside
// every box. Targets are f(x) + sigma * N(0, 1). Rows are grouped by piece:
// box 1, ..., box m, then the default region.
//
// Throws InputError when n < (m + 1)(d + 2) or when placement keeps failing.
std::pair<Dataset, GroundTruth> generate_separable(const GeneratorConfig& config);

}  // namespace calr
