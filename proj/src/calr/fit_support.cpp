#include "fit_internal.hpp"

#include "calr/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace calr {

void FitConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("fit: tau must lie in (0, 1)");
  if (epsilon && !(*epsilon > 0.0 && std::isfinite(*epsilon))) throw InputError("fit: epsilon must be positive");
  if (!(delta > 0.0 && std::isfinite(delta))) throw InputError("fit: delta must be positive");
  if (max_samples && *max_samples == 0) throw InputError("fit: max-samples must be positive");
}

std::size_t default_sample_budget(std::size_t m, std::size_t d) {
  const double raw = 200.0 * std::pow(2.0 * static_cast<double>(std::max<std::size_t>(m, 1)), static_cast<double>(d + 1));
  return static_cast<std::size_t>(std::clamp(raw, 1000.0, 1e7));
}

namespace detail {

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

double epsilon_floor(const Dataset& data) { return 1e-8 * (1.0 + data.y().cwiseAbs().maxCoeff()); }

namespace {

double residual(const LinearModel& f, const Dataset& data, std::size_t row) {
  const auto i = static_cast<Eigen::Index>(row);
  return data.y()(i) - predict_linear(f, data.x().row(i).transpose());
}

}  // namespace

double estimate_epsilon(const LinearModel& f, const Dataset& data, std::span<const std::size_t> pool,
                        std::size_t groups) {
  const double floor = epsilon_floor(data);
  const std::size_t d = data.dim();
  const std::size_t rank = std::max<std::size_t>(
      1, std::min(pool.size(), (pool.size() + 2 * groups - 1) / (2 * groups)));
  std::vector<double> abs_r(pool.size());
  auto scale = [&](const LinearModel& g) {
    for (std::size_t i = 0; i < pool.size(); ++i) abs_r[i] = std::abs(residual(g, data, pool[i]));
    std::nth_element(abs_r.begin(), abs_r.begin() + static_cast<std::ptrdiff_t>(rank - 1), abs_r.end());
    return abs_r[rank - 1] / 0.6744897501960817;
  };
  const double sigma = scale(f);
  std::vector<std::size_t> consensus;
  for (auto r : pool)
    if (std::abs(residual(f, data, r)) < 3.0 * sigma) consensus.push_back(r);
  double refined = sigma;
  if (consensus.size() >= d + 2) {
    const Dataset part = data.subset(consensus);
    if (design_rank(part.x()) == d + 1) refined = scale(lr(part));
  }
  return std::max(floor, 3.0 * refined);
}

Sampler::Sampler(const Dataset& data, const FitConfig& config, FitDiagnostics& diagnostics)
    : data_(data), config_(config), diag_(diagnostics), rng_(config.seed), epsilon_(config.epsilon) {
  const std::size_t d = data.dim();
  sample_size_ = config.sample_size == 0 ? d + 2 : config.sample_size;
  if (sample_size_ < d + 2) {
    throw InputError("fit: sample size must be at least d + 2 = " + std::to_string(d + 2));
  }
  budget_ = config.max_samples.value_or(default_sample_budget(config.m, d));
}

std::optional<LinearModel> Sampler::gated_draw(std::span<const std::size_t> pool, std::vector<std::size_t>& sample) {
  ++diag_.samples;
  sample.clear();
  for (auto k : rng_.sample_indices(pool.size(), sample_size_)) sample.push_back(pool[k]);
  const Dataset part = data_.subset(sample);
  if (design_rank(part.x()) < data_.dim() + 1) {
    ++diag_.degenerate;
    return std::nullopt;
  }
  LinearModel f = lr(part);
  if (!(f.p_value < config_.tau)) return std::nullopt;
  return f;
}

std::size_t Sampler::calibration_draws() const {
  const double want = 10.0 * std::pow(static_cast<double>(config_.m + 1), static_cast<double>(sample_size_ - 1));
  return static_cast<std::size_t>(std::clamp(want, 10.0, static_cast<double>(std::max<std::size_t>(budget_ / 2, 10))));
}

bool Sampler::calibrate(std::span<const std::size_t> pool) {
  std::optional<double> best;
  const std::size_t stop = diag_.samples + calibration_draws();
  std::vector<std::size_t> sample;
  while (diag_.samples < stop && diag_.samples < budget_ && pool.size() >= sample_size_) {
    const auto f = gated_draw(pool, sample);
    if (!f) continue;
    const double eps = estimate_epsilon(*f, data_, pool, config_.m + 1);
    if (!best || eps < *best) best = eps;
  }
  if (best) epsilon_ = best;
  return best.has_value();
}

LinearModel Sampler::refine(LinearModel f, std::span<const std::size_t> pool, double eps) const {
  for (int round = 0; round < 3; ++round) {
    std::vector<std::size_t> consensus;
    for (auto r : pool)
      if (fits(f, data_, r, eps)) consensus.push_back(r);
    if (consensus.size() < data_.dim() + 2) break;
    const Dataset part = data_.subset(consensus);
    if (design_rank(part.x()) < data_.dim() + 1) break;
    f = lr(part);
  }
  return f;
}

std::optional<Draw> Sampler::next(std::span<const std::size_t> pool, const std::vector<LinearModel>& accepted) {
  if (!epsilon_ && !calibrate(pool)) return std::nullopt;
  const double eps = *epsilon_;
  std::vector<std::size_t> sample;
  while (diag_.samples < budget_) {
    if (pool.size() < sample_size_) return std::nullopt;
    auto f = gated_draw(pool, sample);
    if (!f) continue;
    if (!std::all_of(sample.begin(), sample.end(), [&](std::size_t r) { return fits(*f, data_, r, eps); })) continue;
    if (!std::all_of(accepted.begin(), accepted.end(),
                     [&](const LinearModel& g) { return coefficient_distance(*f, g) >= config_.delta; })) {
      continue;
    }
    std::vector<std::size_t> unfitted;
    for (auto r : pool)
      if (!fits(*f, data_, r, eps)) unfitted.push_back(r);
    if (!construct_area(config_.separator, select_rows(data_.x(), sample), select_rows(data_.x(), unfitted))) continue;
    return Draw{refine(std::move(*f), pool, eps), std::move(sample), eps};
  }
  return std::nullopt;
}

std::vector<std::vector<std::size_t>> route_rows(const CalfModel& model, const Dataset& data) {
  std::vector<std::vector<std::size_t>> out(model.pieces.size() + 1);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = model.locate(data.point(i));
    out[p ? *p : model.pieces.size()].push_back(i);
  }
  return out;
}

namespace {

// Plane w . x - b with w . x - b >= 1 on `pos` and <= -1 on `neg`.
std::optional<Eigen::VectorXd> separate_sets(const PointSet& pos, const PointSet& neg) {
  const auto d = pos.cols();
  Eigen::MatrixXd g(pos.rows() + neg.rows(), d + 1);
  Eigen::VectorXd h = Eigen::VectorXd::Constant(g.rows(), -1.0);
  g.topLeftCorner(pos.rows(), d) = -pos;
  g.topRightCorner(pos.rows(), 1).setOnes();
  g.bottomLeftCorner(neg.rows(), d) = neg;
  g.bottomRightCorner(neg.rows(), 1).setConstant(-1.0);
  return lp::find_feasible_point(g, h);
}

}  // namespace

void enforce_disjoint(CalfModel& model, const Dataset& data) {
  auto routed = route_rows(model, data);
  std::vector<Piece> kept;
  for (std::size_t p = 0; p < model.pieces.size(); ++p)
    if (!routed[p].empty()) kept.push_back(std::move(model.pieces[p]));
  model.pieces = std::move(kept);
  routed = route_rows(model, data);

  for (std::size_t a = 0; a < model.pieces.size(); ++a) {
    for (std::size_t b = a + 1; b < model.pieces.size(); ++b) {
      if (!areas_intersect(model.pieces[a].area, model.pieces[b].area, model.d)) continue;
      const PointSet pos = select_rows(data.x(), routed[a]);
      const PointSet neg = select_rows(data.x(), routed[b]);
      const auto z = separate_sets(pos, neg);
      if (!z) {
        throw DiagnosticError("fit: rows of pieces " + std::to_string(a + 1) + " and " + std::to_string(b + 1) +
                              " are not linearly separable; areas cannot be made disjoint");
      }
      HalfSpace plane{z->head(static_cast<Eigen::Index>(model.d)), -(*z)(static_cast<Eigen::Index>(model.d))};
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (Eigen::Index i = 0; i < pos.rows(); ++i) lo = std::min(lo, plane.eval(pos.row(i).transpose()));
      for (Eigen::Index i = 0; i < neg.rows(); ++i) hi = std::max(hi, plane.eval(neg.row(i).transpose()));
      if (!(lo > hi)) throw DiagnosticError("fit: separating plane between pieces collapsed");
      const double cut_neg = hi + (lo - hi) / 3.0;
      const double cut_pos = hi + 2.0 * (lo - hi) / 3.0;
      model.pieces[a].area.halfspaces.push_back(HalfSpace{-plane.alpha, cut_pos - plane.gamma});
      model.pieces[b].area.halfspaces.push_back(HalfSpace{plane.alpha, plane.gamma - cut_neg});
    }
  }
}

void polish(CalfModel& model, const Dataset& data, double epsilon, FitDiagnostics& diagnostics) {
  const auto routed = route_rows(model, data);
  const std::size_t d = model.d;
  auto refit = [&](LinearModel& f, const std::vector<std::size_t>& rows) {
    std::vector<std::size_t> good;
    for (auto r : rows)
      if (fits(f, data, r, epsilon)) good.push_back(r);
    if (good.size() < d + 1) return;
    const Dataset part = data.subset(good);
    if (design_rank(part.x()) < d + 1) return;
    f = lr(part);
  };
  diagnostics.piece_points.clear();
  for (std::size_t p = 0; p < model.pieces.size(); ++p) {
    refit(model.pieces[p].model, routed[p]);
    diagnostics.piece_points.push_back(routed[p].size());
  }
  refit(model.default_model, routed.back());
  diagnostics.default_points = routed.back().size();
}

}  // namespace detail
}  // namespace calr
