#include "calr/fit.hpp"

#include "fit_internal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace calr {

namespace {

FitResult global_fit(const Dataset& data, std::string algorithm) {
  FitResult result;
  result.model.d = data.dim();
  result.model.default_model = lr(data);
  result.diagnostics.algorithm = std::move(algorithm);
  result.diagnostics.functions.push_back(result.model.default_model);
  result.diagnostics.default_index = 0;
  result.diagnostics.default_points = data.size();
  return result;
}

std::vector<std::size_t> rows_fitting(const LinearModel& f, const Dataset& data, std::span<const std::size_t> rows,
                                      double eps) {
  std::vector<std::size_t> out;
  for (auto r : rows)
    if (fits(f, data, r, eps)) out.push_back(r);
  return out;
}

std::vector<std::size_t> minus(std::span<const std::size_t> rows, const std::vector<std::size_t>& removed,
                               std::size_t n) {
  std::vector<char> drop(n, 0);
  for (auto r : removed) drop[r] = 1;
  std::vector<std::size_t> out;
  for (auto r : rows)
    if (!drop[r]) out.push_back(r);
  return out;
}

}  // namespace

FitResult cas_calr(const Dataset& data, const FitConfig& config) {
  config.validate();
  if (config.m == 0) return global_fit(data, "cas");
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (n <= (config.m + 1) * (d + 1)) {
    throw InputError("cas: need n > (m+1)(d+1) = " + std::to_string((config.m + 1) * (d + 1)) + " rows");
  }

  FitResult result;
  auto& diag = result.diagnostics;
  diag.algorithm = "cas";
  detail::Sampler sampler(data, config, diag);

  // Sampling: one accepted function per group, the pool shrinking as groups
  // are explained.
  std::vector<LinearModel> functions;
  std::vector<std::size_t> pool = detail::all_rows(n);
  while (functions.size() < config.m + 1) {
    auto draw = sampler.next(pool, functions);
    if (!draw) {
      diag.functions = functions;
      diag.epsilon = sampler.epsilon().value_or(0.0);
      throw BudgetExhausted("cas: sampling budget exhausted after " + std::to_string(diag.samples) + " draws with " +
                                std::to_string(functions.size()) + " of " + std::to_string(config.m + 1) +
                                " functions found",
                            diag);
    }
    const double eps = *sampler.epsilon();
    std::erase_if(pool, [&](std::size_t r) { return fits(draw->f, data, r, eps); });
    functions.push_back(std::move(draw->f));
  }
  const double eps = *sampler.epsilon();
  diag.epsilon = eps;
  diag.functions = functions;

  // Area construction over the rows fitted by exactly one function.
  const auto unique = distinct_rows(functions, data, eps);
  std::vector<bool> separable(functions.size());
  std::vector<std::size_t> unique_count(functions.size());
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const auto own = rows_fitting(functions[i], data, unique, eps);
    unique_count[i] = own.size();
    if (own.empty()) {
      separable[i] = true;
      continue;
    }
    const auto rest = minus(unique, own, n);
    separable[i] = construct_area(config.separator, select_rows(data.x(), own), select_rows(data.x(), rest)).has_value();
  }
  std::vector<std::size_t> blocked;
  for (std::size_t i = 0; i < functions.size(); ++i)
    if (!separable[i]) blocked.push_back(i);
  std::size_t f0 = 0;
  if (blocked.size() == 1) {
    f0 = blocked[0];
  } else if (blocked.empty()) {
    f0 = static_cast<std::size_t>(std::max_element(unique_count.begin(), unique_count.end()) - unique_count.begin());
  } else {
    throw DiagnosticError("cas: " + std::to_string(blocked.size()) +
                          " functions have point sets no convex area can isolate; data not separable");
  }
  diag.default_index = f0;

  std::vector<std::size_t> closest(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    double best = std::abs(data.y()(static_cast<Eigen::Index>(r)) - predict_linear(functions[0], data.point(r)));
    for (std::size_t i = 1; i < functions.size(); ++i) {
      const double e = std::abs(data.y()(static_cast<Eigen::Index>(r)) - predict_linear(functions[i], data.point(r)));
      if (e < best) best = e, closest[r] = i;
    }
  }

  std::vector<Piece> pieces;
  std::vector<std::size_t> current = unique;
  for (std::size_t i = 0; i < functions.size(); ++i) {
    if (i == f0) continue;
    const auto own = rows_fitting(functions[i], data, current, eps);
    if (own.empty()) continue;
    auto rest = minus(current, own, n);
    const PointSet own_x = select_rows(data.x(), own);
    // Unlisted rows closer to another function are kept out too, unless they
    // sit inside the hull of f's rows.
    std::vector<char> listed(n, 0);
    for (auto r : current) listed[r] = 1;
    for (std::size_t r = 0; r < n; ++r) {
      if (listed[r] || fits(functions[i], data, r, eps) || closest[r] == i) continue;
      if (!point_in_hull(data.point(r), own_x)) rest.push_back(r);
    }
    auto area = construct_area(config.separator, own_x, select_rows(data.x(), rest));
    if (!area) throw DiagnosticError("cas: rows of function " + std::to_string(i + 1) + " cannot be isolated");
    std::vector<std::size_t> taken;
    for (auto r : current)
      if (area->contains(data.point(r))) taken.push_back(r);
    current = minus(current, taken, n);
    pieces.push_back(Piece{functions[i], std::move(*area)});
  }

  // Rows fitted by two or more piece functions that no area claimed.
  std::vector<std::size_t> leftovers;
  for (std::size_t r = 0; r < n; ++r) {
    if (fits(functions[f0], data, r, eps)) continue;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < functions.size(); ++i)
      if (i != f0 && fits(functions[i], data, r, eps)) ++hits;
    if (hits < 2) continue;
    const bool claimed =
        std::any_of(pieces.begin(), pieces.end(), [&](const Piece& p) { return p.area.contains(data.point(r)); });
    if (!claimed) leftovers.push_back(r);
  }
  auto extra = post(pieces, data, leftovers, eps, config.separator);
  diag.post_pieces = extra.size();

  result.model.d = d;
  result.model.default_model = functions[f0];
  result.model.pieces = std::move(pieces);
  for (auto& p : extra) result.model.pieces.push_back(std::move(p));
  detail::enforce_disjoint(result.model, data);
  detail::polish(result.model, data, eps, diag);
  return result;
}

}  // namespace calr
