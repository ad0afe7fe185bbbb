#include "calr/fit.hpp"

#include <limits>
#include <string>

namespace calr {

namespace {

double squared_error(const LinearModel& f, const Dataset& data) { return residuals(f, data).squaredNorm(); }

}  // namespace

CalfModel naive_calr(const Dataset& data, const NaiveOptions& options) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (n > options.max_n && !options.allow_large) {
    throw InputError("naive-fit: n = " + std::to_string(n) + " exceeds the cap of " + std::to_string(options.max_n) +
                     " (exponential search; override to force)");
  }
  if (n > 62) throw InputError("naive-fit: n above 62 is not enumerable");

  CalfModel best;
  best.d = d;
  best.default_model = lr(data);
  double best_loss = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> inside, outside;
  for (std::size_t size = d + 1; size + d + 1 <= n; ++size) {
    // Subsets of one size in lexicographic order of their row indices.
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      inside = pick;
      outside.clear();
      for (std::size_t r = 0, k = 0; r < n; ++r) {
        if (k < size && pick[k] == r) {
          ++k;
        } else {
          outside.push_back(r);
        }
      }
      auto area = cac(select_rows(data.x(), inside), select_rows(data.x(), outside));
      if (area && members(*area, data.x()).size() == size) {
        const Dataset din = data.subset(inside);
        const Dataset dout = data.subset(outside);
        const LinearModel f = lr(din);
        const LinearModel g = lr(dout);
        const double loss = squared_error(f, din) + squared_error(g, dout);
        if (loss < best_loss) {
          best_loss = loss;
          best.default_model = g;
          best.pieces = {Piece{f, std::move(*area)}};
        }
      }
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return best;
}

}  // namespace calr
