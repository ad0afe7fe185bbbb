#include "calr/error.hpp"
#include "calr/geometry.hpp"
#include "calr/rng.hpp"
#include "calr/separation.hpp"
#include "calr/simplex.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace calr;

namespace {

PointSet pts1(std::initializer_list<double> v) {
  PointSet p(v.size(), 1);
  Eigen::Index i = 0;
  for (double a : v) p(i++, 0) = a;
  return p;
}

PointSet random_points(Rng& rng, std::size_t n, std::size_t d, double lo = -1, double hi = 1) {
  PointSet p(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) p(i, j) = rng.uniform(lo, hi);
  return p;
}

std::vector<Eigen::Vector2d> as2d(const PointSet& p) {
  std::vector<Eigen::Vector2d> out;
  for (Eigen::Index i = 0; i < p.rows(); ++i) out.emplace_back(p(i, 0), p(i, 1));
  return out;
}

void check_sound(const ConvexArea& area, const PointSet& inside, const PointSet& outside) {
  for (Eigen::Index i = 0; i < inside.rows(); ++i) CHECK(area.contains(inside.row(i).transpose()));
  for (Eigen::Index i = 0; i < outside.rows(); ++i) CHECK_FALSE(area.contains(outside.row(i).transpose()));
}

// Random (inside, outside) split of a point cloud.
std::pair<PointSet, PointSet> random_split(Rng& rng, std::size_t d, bool clustered) {
  const std::size_t n_in = 1 + rng.below(8);
  const std::size_t n_out = 1 + rng.below(20);
  PointSet in = clustered ? random_points(rng, n_in, d, -0.3, 0.3) : random_points(rng, n_in, d);
  PointSet out = random_points(rng, n_out, d, -2, 2);
  return {in, out};
}

}  // namespace

TEST_CASE("halfspace and area membership") {
  const HalfSpace h{Eigen::Vector2d(1, 0), -1};
  CHECK(h.contains(Eigen::Vector2d(1, 5)));
  CHECK(h.contains(Eigen::Vector2d(0, 5)));
  CHECK_FALSE(h.contains(Eigen::Vector2d(1.001, 0)));
  ConvexArea all;
  CHECK(all.is_everything());
  CHECK(all.contains(Eigen::Vector2d(1e9, -1e9)));
  ConvexArea box{{{Eigen::Vector2d(1, 0), -1}, {Eigen::Vector2d(-1, 0), 0}}};
  PointSet p(3, 2);
  p << 0.5, 0, 2, 0, -1, 0;
  CHECK(members(box, p) == std::vector<std::size_t>{0});
}

TEST_CASE("areas_intersect detects overlap") {
  const ConvexArea a{{{Eigen::VectorXd::Constant(1, 1.0), -1}}};   // x <= 1
  const ConvexArea b{{{Eigen::VectorXd::Constant(1, -1.0), 2}}};   // x >= 2
  const ConvexArea c{{{Eigen::VectorXd::Constant(1, -1.0), 0.5}}}; // x >= 0.5
  CHECK_FALSE(areas_intersect(a, b, 1));
  CHECK(areas_intersect(a, c, 1));
  CHECK(areas_intersect(ConvexArea{}, b, 1));
}

TEST_CASE("lp finds feasible points and reports infeasibility") {
  Eigen::MatrixXd g(2, 1);
  g << 1, -1;
  const auto ok = lp::find_feasible_point(g, Eigen::Vector2d(3, -1));  // x <= 3, x >= 1
  REQUIRE(ok);
  CHECK((*ok)(0) >= 1 - 1e-9);
  CHECK((*ok)(0) <= 3 + 1e-9);
  CHECK_FALSE(lp::find_feasible_point(g, Eigen::Vector2d(1, -3)));  // x <= 1, x >= 3
}

TEST_CASE("point_in_hull basics") {
  PointSet sq(4, 2);
  sq << 0, 0, 1, 0, 0, 1, 1, 1;
  CHECK(point_in_hull(Eigen::Vector2d(0.5, 0.5), sq));
  CHECK(point_in_hull(Eigen::Vector2d(1, 0), sq));
  CHECK(point_in_hull(Eigen::VectorXd::Constant(1, 0.0), pts1({0, 1})));
  CHECK_FALSE(point_in_hull(Eigen::VectorXd::Constant(1, 3.0), pts1({0, 1})));
  CHECK_THROWS_AS(point_in_hull(Eigen::Vector2d(0, 0), PointSet(0, 2)), InputError);
}

TEST_CASE("point_in_hull agrees with a planar hull oracle") {
  Rng rng(31);
  for (int t = 0; t < 300; ++t) {
    const auto d = random_points(rng, 3 + rng.below(15), 2);
    const Eigen::Vector2d q(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2));
    CHECK(point_in_hull(q, d) == oracle::in_hull_2d(q, as2d(d)));
  }
}

TEST_CASE("gslp separates in one dimension") {
  const auto d = pts1({0, 1, 2});
  const auto h = gslp(Eigen::VectorXd::Constant(1, 5.0), d);
  REQUIRE(h);
  CHECK(h->alpha(0) > 0);  // points on the nonpositive side lie to the left
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(h->contains(d.row(i).transpose()));
  CHECK(h->eval(Eigen::VectorXd::Constant(1, 5.0)) > 0);
}

TEST_CASE("gslp returns none at the centre of a diamond") {
  PointSet d(4, 2);
  d << 1, 0, 0, 1, -1, 0, 0, -1;
  CHECK_FALSE(gslp(Eigen::Vector2d(0, 0), d));
}

TEST_CASE("gslp is the dual of hull membership") {
  Rng rng(32);
  for (int t = 0; t < 200; ++t) {
    const auto d = random_points(rng, 3 + rng.below(20), 2);
    const Eigen::Vector2d q(rng.uniform(-1.3, 1.3), rng.uniform(-1.3, 1.3));
    const auto h = gslp(q, d);
    CHECK(h.has_value() != oracle::in_hull_2d(q, as2d(d)));
    if (h) {
      CHECK(h->eval(q) > 0);
      for (Eigen::Index i = 0; i < d.rows(); ++i) CHECK(h->contains(d.row(i).transpose()));
    }
  }
}

TEST_CASE("svm on two points puts the plane at the midpoint") {
  const auto r = svm_soft(pts1({0}), pts1({2}), {1.0});
  REQUIRE(r.converged);
  CHECK(r.plane.alpha(0) == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(r.plane.gamma == doctest::Approx(1.0).epsilon(1e-4));
  // Grid search over (alpha, gamma).
  double best = 1e300;
  for (int i = -300; i <= 300; ++i) {
    for (int j = -300; j <= 300; ++j) {
      const HalfSpace h{Eigen::VectorXd::Constant(1, i * 0.01), j * 0.01};
      best = std::min(best, svm_objective(h, pts1({0}), pts1({2}), 1.0));
    }
  }
  CHECK(std::abs(r.objective - best) <= 1e-3);
}

TEST_CASE("svm separates separable sets with unit margin") {
  Rng rng(33);
  for (int t = 0; t < 20; ++t) {
    auto pos = random_points(rng, 10, 2, 0, 1);
    auto neg = random_points(rng, 10, 2, 0, 1);
    pos.col(0).array() += 1.5;
    const auto r = svm_soft(pos, neg);
    REQUIRE(r.converged);
    for (Eigen::Index i = 0; i < pos.rows(); ++i) CHECK(r.plane.eval(pos.row(i).transpose()) >= 1 - 1e-6);
    for (Eigen::Index i = 0; i < neg.rows(); ++i) CHECK(r.plane.eval(neg.row(i).transpose()) <= -1 + 1e-6);
  }
}

TEST_CASE("svm on overlapping classes matches grid search") {
  const auto pos = pts1({0, 1, 3});
  const auto neg = pts1({1, 2, 4});
  const auto r = svm_soft(pos, neg, {1.0});
  double worst_slack = 0;
  for (Eigen::Index i = 0; i < pos.rows(); ++i) worst_slack = std::max(worst_slack, 1 - r.plane.eval(pos.row(i).transpose()));
  CHECK(worst_slack > 0);
  double best = 1e300;
  for (int i = -400; i <= 400; ++i) {
    for (int j = -400; j <= 400; ++j) {
      const HalfSpace h{Eigen::VectorXd::Constant(1, i * 0.005), j * 0.005};
      best = std::min(best, svm_objective(h, pos, neg, 1.0));
    }
  }
  CHECK(r.objective <= best + 1e-3);
  CHECK(r.objective >= best - 1e-3);
}

TEST_CASE("cac builds an interval") {
  const auto inside = pts1({0, 1, 2});
  const auto area = cac(inside, pts1({10}));
  REQUIRE(area);
  check_sound(*area, inside, pts1({10}));
  CHECK(area->halfspaces.size() == 1);
}

TEST_CASE("cac with nothing to exclude is all of space") {
  const auto area = cac(pts1({0, 1, 2}), PointSet(0, 1));
  REQUIRE(area);
  CHECK(area->is_everything());
}

TEST_CASE("cac uses two cuts when excluded rows flank the set") {
  const auto inside = pts1({4, 5, 6});
  const auto outside = pts1({0, 1, 2, 8, 9, 10, 11});
  const auto area = cac(inside, outside);
  REQUIRE(area);
  check_sound(*area, inside, outside);
  CHECK(area->halfspaces.size() == 2);
}

TEST_CASE("cac fails exactly when an excluded point is inside the hull") {
  Rng rng(34);
  for (int t = 0; t < 50; ++t) {
    const auto all = random_points(rng, 40, 2);
    std::vector<std::size_t> rows(5);
    std::iota(rows.begin(), rows.end(), 0);
    const auto area = cac(all, rows);
    const auto in = all.topRows(5);
    bool blocked = false;
    for (Eigen::Index i = 5; i < 40; ++i) blocked = blocked || oracle::in_hull_2d(all.row(i).transpose(), as2d(in));
    CHECK(area.has_value() == !blocked);
    if (area) check_sound(*area, in, all.bottomRows(35));
  }
}

TEST_CASE("cac halfspaces never outnumber excluded points") {
  Rng rng(35);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + rng.below(3);
    auto [in, out] = random_split(rng, d, true);
    const auto area = cac(in, out);
    if (area) CHECK(area->halfspaces.size() <= static_cast<std::size_t>(out.rows()));
  }
}

TEST_CASE("cacs matches cac verdicts") {
  Rng rng(36);
  for (int t = 0; t < 60; ++t) {
    const std::size_t d = 1 + rng.below(3);
    auto [in, out] = random_split(rng, d, t % 2 == 0);
    const auto a = cac(in, out);
    const auto s = cacs(in, out);
    CHECK(s.status != CacsStatus::svm_failed);
    CHECK(a.has_value() == s.area.has_value());
    if (s.area) check_sound(*s.area, in, out);
  }
  const auto single = cacs(pts1({0}), pts1({5, 6}));
  REQUIRE(single.area);
  CHECK(single.area->halfspaces.size() >= 1);
  CHECK(single.area->contains(Eigen::VectorXd::Constant(1, 0.0)));
  CHECK(cacs(pts1({0, 1, 2}), PointSet(0, 1)).area->is_everything());
}

TEST_CASE("construct_area dispatches on the separator") {
  const auto in = pts1({0, 1});
  const auto out = pts1({5});
  CHECK(construct_area(Separator::lp, in, out).has_value());
  CHECK(construct_area(Separator::svm, in, out).has_value());
  CHECK_FALSE(construct_area(Separator::lp, in, pts1({0.5})).has_value());
  CHECK(parse_separator("svm") == Separator::svm);
  CHECK_THROWS_AS(parse_separator("qp"), InputError);
}
