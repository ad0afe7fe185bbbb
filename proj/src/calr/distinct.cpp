#include "calr/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace calr {

bool fits(const LinearModel& f, const Dataset& data, std::size_t row, double epsilon) {
  const auto i = static_cast<Eigen::Index>(row);
  return std::abs(data.y()(i) - predict_linear(f, data.x().row(i).transpose())) < epsilon;
}

std::vector<std::size_t> distinct_rows(const std::vector<LinearModel>& functions, const Dataset& data,
                                       double epsilon) {
  // 0 = fits nothing yet, 1 = fits exactly one, -1 = fits several.
  std::vector<int> mark(data.size(), 0);
  for (const auto& f : functions) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!fits(f, data, i, epsilon)) continue;
      mark[i] = mark[i] == 0 ? 1 : -1;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (mark[i] == 1) out.push_back(i);
  return out;
}

Dataset distinct(const std::vector<LinearModel>& functions, const Dataset& data, double epsilon) {
  const auto rows = distinct_rows(functions, data, epsilon);
  if (rows.empty()) throw DiagnosticError("distinct: no row is fitted by exactly one function");
  return data.subset(rows);
}

std::vector<Piece> post(const std::vector<Piece>& pieces, const Dataset& data, std::span<const std::size_t> leftovers,
                        double epsilon, Separator separator) {
  std::vector<Piece> out;
  std::vector<std::size_t> remaining(leftovers.begin(), leftovers.end());
  std::vector<char> is_left(data.size(), 0);
  for (auto r : remaining) is_left[r] = 1;

  for (std::size_t a = 0; a < pieces.size(); ++a) {
    const auto& f = pieces[a].model;
    for (std::size_t b = 0; b < pieces.size(); ++b) {
      if (a == b) continue;
      const auto& g = pieces[b].model;
      std::vector<std::size_t> both;
      for (auto r : remaining)
        if (fits(f, data, r, epsilon) && fits(g, data, r, epsilon)) both.push_back(r);
      if (both.empty()) continue;

      std::vector<char> in_both(data.size(), 0);
      for (auto r : both) in_both[r] = 1;
      std::vector<std::size_t> others;
      for (std::size_t r = 0; r < data.size(); ++r)
        if (!in_both[r]) others.push_back(r);
      auto area = construct_area(separator, select_rows(data.x(), both), select_rows(data.x(), others));
      if (!area) {
        throw DiagnosticError("post: rows fitted by functions " + std::to_string(a + 1) + " and " +
                              std::to_string(b + 1) + " cannot be enclosed by a convex area");
      }
      out.push_back(Piece{f, std::move(*area)});
      std::erase_if(remaining, [&](std::size_t r) { return in_both[r] != 0; });
    }
  }
  return out;
}

std::size_t draws_until_single_group(std::span<const std::size_t> labels, std::size_t subset_size, Rng& rng) {
  if (subset_size == 0 || subset_size > labels.size()) throw InputError("draws: bad subset size");
  for (std::size_t t = 1;; ++t) {
    const auto rows = rng.sample_indices(labels.size(), subset_size);
    const bool pure = std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return labels[r] == labels[rows[0]]; });
    if (pure) return t;
  }
}

double expected_draws_until_single_group(std::span<const std::size_t> group_sizes, std::size_t subset_size) {
  std::size_t n = 0;
  for (auto g : group_sizes) n += g;
  if (subset_size == 0 || subset_size > n) throw InputError("draws: bad subset size");
  double p = 0.0;
  for (auto g : group_sizes) {
    if (g < subset_size) continue;
    double ratio = 1.0;
    for (std::size_t j = 0; j < subset_size; ++j) ratio *= static_cast<double>(g - j) / static_cast<double>(n - j);
    p += ratio;
  }
  return 1.0 / p;
}

}  // namespace calr
