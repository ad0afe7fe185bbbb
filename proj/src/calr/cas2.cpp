#include "calr/fit.hpp"

#include "fit_internal.hpp"

#include <cmath>
#include <string>

namespace calr {

FitResult cas2(const Dataset& data, const FitConfig& config) {
  config.validate();
  if (config.m != 1) throw InputError("cas2: requires m = 1 (got " + std::to_string(config.m) + ")");
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (n <= 2 * (d + 1)) throw InputError("cas2: need n > 2(d+1) = " + std::to_string(2 * (d + 1)) + " rows");

  FitResult result;
  auto& diag = result.diagnostics;
  diag.algorithm = "cas2";
  detail::Sampler sampler(data, config, diag);
  const auto rows = detail::all_rows(n);
  auto draw = sampler.next(rows, {});
  if (!draw) {
    throw BudgetExhausted("cas2: sampling budget exhausted after " + std::to_string(diag.samples) + " draws", diag);
  }
  const double eps = sampler.epsilon().value_or(draw->epsilon);
  diag.epsilon = eps;
  const LinearModel f1 = draw->f;

  std::vector<std::size_t> fit1, rest;
  for (auto r : rows) (fits(f1, data, r, eps) ? fit1 : rest).push_back(r);
  result.model.d = d;
  if (rest.empty()) {
    result.model.default_model = f1;
    diag.functions = {f1};
    diag.default_index = 0;
    diag.branch = "single";
    detail::polish(result.model, data, eps, diag);
    return result;
  }
  auto err = [&](const LinearModel& f, std::size_t r) {
    return std::abs(data.y()(static_cast<Eigen::Index>(r)) - predict_linear(f, data.point(r)));
  };
  // Rows of f1's group that miss the band would drag the fit, so rest is
  // trimmed to the rows closer to f2 until it settles.
  LinearModel f2 = lr(data.subset(rest));
  for (int round = 0; round < 10; ++round) {
    std::vector<std::size_t> near2;
    for (auto r : rest)
      if (err(f2, r) < err(f1, r)) near2.push_back(r);
    if (near2.size() < d + 1 || design_rank(select_rows(data.x(), near2)) < d + 1) break;
    auto next = lr(data.subset(near2));
    const bool settled = coefficient_distance(next, f2) <= 1e-12 * (1.0 + next.coeffs.norm());
    f2 = std::move(next);
    if (settled) break;
  }
  diag.functions = {f1, f2};

  // Rows fitted by both functions belong to neither side; rows fitted by
  // neither are noise and take no part in the separation.
  std::vector<std::size_t> only1, only2;
  for (auto r : fit1)
    if (!fits(f2, data, r, eps)) only1.push_back(r);
  for (auto r : rest)
    if (fits(f2, data, r, eps)) only2.push_back(r);

  const PointSet p1 = select_rows(data.x(), only1);
  const PointSet p2 = select_rows(data.x(), only2);
  // Rows fitted by neither are kept on the side of the closer function when
  // they lie outside the hull of the other side.
  auto guarded = [&](const PointSet& inside, const std::vector<std::size_t>& outside, const LinearModel& own,
                     const LinearModel& other) {
    std::vector<std::size_t> out = outside;
    for (std::size_t r = 0; r < n; ++r) {
      if (fits(own, data, r, eps) || fits(other, data, r, eps) || err(own, r) <= err(other, r)) continue;
      if (!point_in_hull(data.point(r), inside)) out.push_back(r);
    }
    return select_rows(data.x(), out);
  };
  std::optional<ConvexArea> c1, c2;
  if (!only1.empty()) c1 = construct_area(config.separator, p1, guarded(p1, only2, f1, f2));
  if (!c1 && !only2.empty()) c2 = construct_area(config.separator, p2, guarded(p2, only1, f2, f1));

  if (c1) {
    result.model.pieces.push_back(Piece{f1, std::move(*c1)});
    result.model.default_model = f2;
    diag.default_index = 1;
    diag.branch = "c1";
  } else if (c2) {
    result.model.pieces.push_back(Piece{f2, std::move(*c2)});
    result.model.default_model = f1;
    diag.default_index = 0;
    diag.branch = "c1-none";
  } else {
    throw DiagnosticError("cas2: neither function's rows can be isolated by a convex area; data not separable");
  }
  detail::polish(result.model, data, eps, diag);
  return result;
}

}  // namespace calr
