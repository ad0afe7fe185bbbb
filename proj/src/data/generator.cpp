#include "calr/generator.hpp"

#include "calr/error.hpp"
#include "calr/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace calr {

namespace {

constexpr int kBoxTries = 2000;
constexpr int kLayoutRestarts = 200;
constexpr int kCoefficientTries = 10000;
constexpr double kCoefficientRange = 5.0;

struct Box {
  Eigen::VectorXd lo;
  double side = 0.0;
};

bool boxes_apart(const Box& a, const Box& b) {
  for (Eigen::Index k = 0; k < a.lo.size(); ++k) {
    const double gap = std::max(b.lo(k) - (a.lo(k) + a.side), a.lo(k) - (b.lo(k) + b.side));
    if (gap >= a.side) return true;
  }
  return false;
}

std::vector<Box> place_boxes(std::size_t m, std::size_t d, Rng& rng) {
  if (m == 0) return {};
  const auto per_axis = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(m), 1.0 / d) - 1e-12));
  const double side = kGeneratorDomain / (3.0 * static_cast<double>(per_axis) + 2.0);
  for (int restart = 0; restart < kLayoutRestarts; ++restart) {
    std::vector<Box> boxes;
    for (std::size_t b = 0; b < m; ++b) {
      bool placed = false;
      for (int t = 0; t < kBoxTries && !placed; ++t) {
        Box box{Eigen::VectorXd(static_cast<Eigen::Index>(d)), side};
        for (std::size_t k = 0; k < d; ++k) box.lo(static_cast<Eigen::Index>(k)) = rng.uniform(side, kGeneratorDomain - 2 * side);
        placed = true;
        for (const auto& other : boxes) {
          if (!boxes_apart(box, other)) {
            placed = false;
            break;
          }
        }
        if (placed) boxes.push_back(std::move(box));
      }
      if (!placed) break;
    }
    if (boxes.size() == m) return boxes;
  }
  throw InputError("gen: could not place " + std::to_string(m) + " separated areas in dimension " +
                   std::to_string(d) + "; parameters too crowded");
}

ConvexArea box_area(const Box& box) {
  const auto d = box.lo.size();
  ConvexArea area;
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e(k) = -1.0;
    area.halfspaces.push_back(HalfSpace{e, box.lo(k)});
    e(k) = 1.0;
    area.halfspaces.push_back(HalfSpace{e, -(box.lo(k) + box.side)});
  }
  return area;
}

std::vector<Eigen::VectorXd> draw_functions(std::size_t count, std::size_t d, double delta, Rng& rng) {
  std::vector<Eigen::VectorXd> out;
  for (int t = 0; t < kCoefficientTries && out.size() < count; ++t) {
    Eigen::VectorXd beta(static_cast<Eigen::Index>(d + 1));
    for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = rng.uniform(-kCoefficientRange, kCoefficientRange);
    if (beta.tail(static_cast<Eigen::Index>(d)).norm() < 1.0) continue;
    bool far = true;
    for (const auto& other : out) far = far && coefficient_distance(beta, other) >= delta;
    if (far) out.push_back(std::move(beta));
  }
  if (out.size() < count) throw InputError("gen: could not draw functions with pairwise distance >= delta");
  return out;
}

}  // namespace

std::pair<Dataset, GroundTruth> generate_separable(const GeneratorConfig& cfg) {
  if (cfg.d < 1) throw InputError("gen: d must be at least 1");
  if (!(cfg.sigma >= 0.0) || !std::isfinite(cfg.sigma)) throw InputError("gen: sigma must be finite and >= 0");
  if (!(cfg.delta > 0.0) || !std::isfinite(cfg.delta)) throw InputError("gen: delta must be positive");
  const std::size_t need = (cfg.m + 1) * (cfg.d + 2);
  if (cfg.n < need) {
    throw InputError("gen: n = " + std::to_string(cfg.n) + " is below (m+1)(d+2) = " + std::to_string(need));
  }

  Rng rng(cfg.seed);
  const auto boxes = place_boxes(cfg.m, cfg.d, rng);
  const auto betas = draw_functions(cfg.m + 1, cfg.d, cfg.delta, rng);

  GroundTruth truth;
  truth.model.d = cfg.d;
  truth.model.default_model = make_linear(betas[0]);
  for (std::size_t b = 0; b < cfg.m; ++b) truth.model.pieces.push_back(Piece{make_linear(betas[b + 1]), box_area(boxes[b])});
  truth.noise_sigma = cfg.sigma;
  truth.separation_delta = cfg.delta;
  truth.margin_epsilon = cfg.sigma > 0 ? 3.0 * cfg.sigma : 1e-9;

  const auto di = static_cast<Eigen::Index>(cfg.d);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(cfg.n), di);
  Eigen::VectorXd y(static_cast<Eigen::Index>(cfg.n));
  const std::size_t per_piece = cfg.n / (cfg.m + 1);
  std::size_t row = 0;
  for (std::size_t b = 0; b < cfg.m; ++b) {
    for (std::size_t i = 0; i < per_piece; ++i, ++row) {
      for (Eigen::Index k = 0; k < di; ++k) x(static_cast<Eigen::Index>(row), k) = boxes[b].lo(k) + boxes[b].side * rng.uniform();
      truth.assignments.push_back(b + 1);
    }
  }
  for (; row < cfg.n; ++row) {
    Eigen::VectorXd p(di);
    bool inside = true;
    while (inside) {
      for (Eigen::Index k = 0; k < di; ++k) p(k) = rng.uniform(0.0, kGeneratorDomain);
      inside = truth.model.locate(p).has_value();
    }
    x.row(static_cast<Eigen::Index>(row)) = p.transpose();
    truth.assignments.push_back(0);
  }
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const auto a = truth.assignments[i];
    const auto& f = a == 0 ? truth.model.default_model : truth.model.pieces[a - 1].model;
    double v = predict_linear(f, x.row(static_cast<Eigen::Index>(i)).transpose());
    if (cfg.sigma > 0) v += cfg.sigma * rng.normal();
    y(static_cast<Eigen::Index>(i)) = v;
  }

  std::vector<std::string> names;
  for (std::size_t k = 0; k < cfg.d; ++k) names.push_back("x" + std::to_string(k + 1));
  names.push_back("y");
  return {Dataset(std::move(x), std::move(y), std::move(names)), std::move(truth)};
}

}  // namespace calr
