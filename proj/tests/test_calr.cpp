#include "calr/calf.hpp"
#include "calr/error.hpp"
#include "calr/fit.hpp"
#include "calr/generator.hpp"
#include "calr/model_io.hpp"
#include "calr/pldc.hpp"
#include "calr/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace calr;

namespace {

HalfSpace hs(double a1, double a2, double g) { return {Eigen::Vector2d(a1, a2), g}; }

CalfModel two_region_model() {
  CalfModel m;
  m.d = 2;
  m.default_model = make_linear(Eigen::Vector3d(0, 0, 0));
  m.pieces.push_back({make_linear(Eigen::Vector3d(0, 1, 1)),
                      {{hs(-1, 0, 0), hs(0, -1, 0), hs(0, 1, -4), hs(2, 1, -12)}}});
  m.pieces.push_back({make_linear(Eigen::Vector3d(6, 0, 0)), {{hs(-2, 1, 6), hs(-1, -1, 12), hs(0.5, -1, 0)}}});
  return m;
}

Dataset make_1d(const std::vector<double>& xs, const std::vector<double>& ys) {
  Eigen::MatrixXd x(xs.size(), 1);
  Eigen::VectorXd y(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x(i, 0) = xs[i];
    y(i) = ys[i];
  }
  return {x, y};
}

// Fitted functions, each within `tol` of a different planted one.
bool matches_planted(const std::vector<LinearModel>& fitted, const GroundTruth& truth, double tol) {
  std::vector<Eigen::VectorXd> planted{truth.model.default_model.coeffs};
  for (const auto& p : truth.model.pieces) planted.push_back(p.model.coeffs);
  if (fitted.size() != planted.size()) return false;
  std::vector<bool> used(planted.size(), false);
  for (const auto& f : fitted) {
    bool found = false;
    for (std::size_t j = 0; j < planted.size() && !found; ++j) {
      if (!used[j] && (f.coeffs - planted[j]).norm() <= tol) used[j] = found = true;
    }
    if (!found) return false;
  }
  return true;
}

std::vector<LinearModel> model_functions(const CalfModel& m) {
  std::vector<LinearModel> out{m.default_model};
  for (const auto& p : m.pieces) out.push_back(p.model);
  return out;
}

void check_disjoint_on_rows(const CalfModel& m, const Dataset& data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t hits = 0;
    for (const auto& p : m.pieces) hits += p.area.contains(data.point(i)) ? 1 : 0;
    CHECK(hits <= 1);
  }
}

}  // namespace

TEST_CASE("model without pieces predicts the default everywhere") {
  CalfModel m;
  m.d = 2;
  m.default_model = make_linear(Eigen::Vector3d(1, 2, 3));
  CHECK(predict(m, Eigen::Vector2d(1, 1)) == 6.0);
  CHECK(predict(m, Eigen::Vector2d(-10, 0)) == -19.0);
}

TEST_CASE("two-region worked example") {
  const auto m = two_region_model();
  CHECK(predict(m, Eigen::Vector2d(1, 1)) == 2.0);
  CHECK(predict(m, Eigen::Vector2d(8, 8)) == 6.0);
  CHECK(predict(m, Eigen::Vector2d(100, 10)) == 0.0);
  CHECK(m.locate(Eigen::Vector2d(1, 1)) == std::optional<std::size_t>(0));
  CHECK_FALSE(m.locate(Eigen::Vector2d(100, 10)).has_value());
  // The second area is unbounded along the diagonal.
  CHECK(predict(m, Eigen::Vector2d(100, 100)) == 6.0);
}

TEST_CASE("boundary points go to the lowest piece index") {
  CalfModel m;
  m.d = 1;
  m.default_model = make_linear(Eigen::Vector2d(0, 0));
  m.pieces.push_back({make_linear(Eigen::Vector2d(1, 0)), {{{Eigen::VectorXd::Constant(1, 1.0), -1}}}});
  m.pieces.push_back({make_linear(Eigen::Vector2d(2, 0)), {{{Eigen::VectorXd::Constant(1, -1.0), 1}}}});
  CHECK(predict(m, Eigen::VectorXd::Constant(1, 1.0)) == 1.0);
  CHECK(predict(m, Eigen::VectorXd::Constant(1, 1.5)) == 2.0);
}

TEST_CASE("a discontinuous two-piece function is representable") {
  CalfModel m;
  m.d = 1;
  m.default_model = make_linear(Eigen::Vector2d(1, 0));
  m.pieces.push_back({make_linear(Eigen::Vector2d(0, 0)), {{{Eigen::VectorXd::Constant(1, 1.0), 0}}}});
  CHECK(predict(m, Eigen::VectorXd::Constant(1, -0.5)) == 0.0);
  CHECK(predict(m, Eigen::VectorXd::Constant(1, 0.5)) == 1.0);
}

TEST_CASE("model validation rejects mixed dimensions") {
  auto m = two_region_model();
  m.pieces[0].model = make_linear(Eigen::Vector4d(1, 2, 3, 4));
  CHECK_THROWS_AS(m.validate(), InputError);
  auto z = two_region_model();
  z.pieces[1].area.halfspaces[0].alpha.setZero();
  CHECK_THROWS_AS(z.validate(), InputError);
}

TEST_CASE("decide_calr") {
  const auto data = make_1d({0, 1, 2}, {1, 2, 3});
  CalfModel perfect;
  perfect.d = 1;
  perfect.default_model = make_linear(Eigen::Vector2d(1, 1));
  CHECK(decide_calr(data, perfect, 1e-9));
  CalfModel zero;
  zero.d = 1;
  zero.default_model = make_linear(Eigen::Vector2d(0, 0));
  const auto unit = make_1d({0, 1}, {1, -1});
  CHECK_FALSE(decide_calr(unit, zero, 1.0));

  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    const auto [d, truth] = generate_separable({40, 2, 1, 0.5, 0.5, rng.next_u64()});
    double sum = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double r = d.target(i) - predict(truth.model, d.point(i));
      sum += r * r;
    }
    const double naive = sum / static_cast<double>(d.size());
    const double bound = rng.uniform(0, 0.5);
    CHECK(decide_calr(d, truth.model, bound) == (naive < bound));
  }
}

TEST_CASE("distinct keeps rows fitted by exactly one function") {
  const auto data = make_1d({0, 0, 0}, {0, 10, 5});
  const LinearModel f = make_linear(Eigen::Vector2d(0, 0));
  const LinearModel g = make_linear(Eigen::Vector2d(10, 0));
  CHECK(distinct_rows({f, g}, data, 1.0) == std::vector<std::size_t>{0, 1});
  const auto kept = distinct({f, g}, data, 1.0);
  CHECK(kept.size() == 2);
  CHECK(distinct_rows({f, f}, data, 1.0).empty());
  CHECK_THROWS_AS(distinct({f, f}, data, 1.0), DiagnosticError);
}

TEST_CASE("distinct drops the crossing strip") {
  Rng rng(42);
  std::vector<double> xs, ys;
  const LinearModel f = make_linear(Eigen::Vector2d(0, 1));
  const LinearModel g = make_linear(Eigen::Vector2d(4, -1));
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(0, 4);
    xs.push_back(x);
    ys.push_back((i % 2 ? x : 4 - x) + 0.05 * rng.normal());
  }
  const auto data = make_1d(xs, ys);
  const double eps = 0.3;
  const auto kept = distinct_rows({f, g}, data, eps);
  std::vector<std::size_t> expect;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const bool a = std::abs(ys[i] - xs[i]) < eps;
    const bool b = std::abs(ys[i] - (4 - xs[i])) < eps;
    if (a != b) expect.push_back(i);
  }
  CHECK(kept == expect);
}

TEST_CASE("post with no leftovers returns nothing") {
  const auto data = make_1d({0, 1}, {0, 1});
  const std::vector<Piece> pieces{{make_linear(Eigen::Vector2d(0, 1)), {}}};
  CHECK(post(pieces, data, {}, 0.5).empty());
}

TEST_CASE("post encloses a crossing strip") {
  // f1 = x and f2 = -x meet at 0; the rows near 0 fit both.
  std::vector<double> xs{-4, -3, -2, -0.2, -0.1, 0, 0.1, 0.2, 2, 3, 4};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(std::abs(x) < 0.5 ? 0.0 : std::abs(x));
  const auto data = make_1d(xs, ys);
  const std::vector<Piece> pieces{{make_linear(Eigen::Vector2d(0, 1)), {{{Eigen::VectorXd::Constant(1, -1.0), 1}}}},
                                  {make_linear(Eigen::Vector2d(0, -1)), {{{Eigen::VectorXd::Constant(1, 1.0), 1}}}}};
  const std::vector<std::size_t> left{3, 4, 5, 6, 7};
  const auto extra = post(pieces, data, left, 0.5);
  REQUIRE(extra.size() == 1);
  CHECK(extra[0].model.coeffs == pieces[0].model.coeffs);
  for (auto r : left) CHECK(extra[0].area.contains(data.point(r)));
  for (std::size_t r : {0, 1, 2, 8, 9, 10}) CHECK_FALSE(extra[0].area.contains(data.point(r)));
}

TEST_CASE("post with three pairwise strips") {
  // f1 = 0, f2 = x - 10, f3 = 20 - x: strips at 10, 15 and 20.
  const LinearModel f1 = make_linear(Eigen::Vector2d(0, 0));
  const LinearModel f2 = make_linear(Eigen::Vector2d(-10, 1));
  const LinearModel f3 = make_linear(Eigen::Vector2d(20, -1));
  std::vector<double> xs{9.9, 10, 10.1, 14.9, 15, 15.1, 19.9, 20, 20.1, 5, 12.5, 17.5, 25};
  std::vector<double> ys{0, 0, 0, 5, 5, 5, 0, 0, 0, 0, 2.5, 2.5, 0};
  const auto data = make_1d(xs, ys);
  const std::vector<Piece> pieces{{f1, {}}, {f2, {}}, {f3, {}}};
  const std::vector<std::size_t> left{0, 1, 2, 3, 4, 5, 6, 7, 8};
  const auto extra = post(pieces, data, left, 0.3);
  REQUIRE(extra.size() == 3);
  for (auto r : left) {
    std::size_t hits = 0;
    for (const auto& p : extra) hits += p.area.contains(data.point(r)) ? 1 : 0;
    CHECK(hits == 1);
  }
  for (double x = 0; x <= 30; x += 0.01) {
    std::size_t hits = 0;
    for (const auto& p : extra) hits += p.area.contains(Eigen::VectorXd::Constant(1, x)) ? 1 : 0;
    CHECK(hits <= 1);
  }
}

TEST_CASE("naive finds the split of a two-line dataset") {
  const auto data = make_1d({0, 1, 2, 3, 10, 11, 12}, {0, 1, 2, 3, 5, 5, 5});
  const auto m = naive_calr(data);
  CHECK(total_squared_error(m, data) < 1e-20);
  REQUIRE(m.pieces.size() == 1);
  CHECK(std::abs(oracle::exhaustive_split_1d({0, 1, 2, 3, 10, 11, 12}, {0, 1, 2, 3, 5, 5, 5}) -
                 total_squared_error(m, data)) < 1e-10);
  for (double x : {10.0, 11.0, 12.0}) CHECK(predict(m, Eigen::VectorXd::Constant(1, x)) == doctest::Approx(5.0));
  for (double x : {0.0, 2.0}) CHECK(predict(m, Eigen::VectorXd::Constant(1, x)) == doctest::Approx(x));
}

TEST_CASE("naive on one line is exact") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 8; ++i) {
    xs.push_back(i);
    ys.push_back(2 * i - 3);
  }
  const auto data = make_1d(xs, ys);
  CHECK(total_squared_error(naive_calr(data), data) < 1e-20);
}

TEST_CASE("naive refuses large inputs") {
  std::vector<double> xs(20), ys(20);
  for (int i = 0; i < 20; ++i) xs[i] = ys[i] = i;
  CHECK_THROWS_AS(naive_calr(make_1d(xs, ys)), InputError);
}

TEST_CASE("naive matches the exhaustive oracle on random data") {
  Rng rng(43);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> xs, ys;
    const std::size_t n = 6 + rng.below(3);
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(rng.uniform(0, 10));
      ys.push_back(rng.uniform(-3, 3));
    }
    const auto data = make_1d(xs, ys);
    CHECK(std::abs(total_squared_error(naive_calr(data), data) - oracle::exhaustive_split_1d(xs, ys)) < 1e-10);
  }
}

TEST_CASE("cas recovers the planted model") {
  const auto [data, truth] = generate_separable({500, 2, 2, 0.01, 1.0, 3});
  FitConfig cfg;
  cfg.m = 2;
  cfg.seed = 9;
  const auto r = cas_calr(data, cfg);
  CHECK(r.model.pieces.size() == 2);
  CHECK(matches_planted(model_functions(r.model), truth, 0.1));
  CHECK(mse(r.model, data) <= 4 * 0.01 * 0.01);
  check_disjoint_on_rows(r.model, data);
  CHECK(r.diagnostics.epsilon >= 0.01);
  CHECK(r.diagnostics.epsilon <= 0.09);
}

TEST_CASE("cas is exact on noiseless data") {
  const auto [data, truth] = generate_separable({500, 2, 2, 0.0, 1.0, 3});
  FitConfig cfg;
  cfg.m = 2;
  cfg.seed = 9;
  const auto r = cas_calr(data, cfg);
  CHECK(mse(r.model, data) <= 1e-16);
  CHECK(r.model.pieces.size() == 2);
  // Rows are routed to a function equal to their planted one.
  const auto regions = assign_regions(r.model, data.x());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto a = truth.assignments[i];
    const auto& planted = a == 0 ? truth.model.default_model : truth.model.pieces[a - 1].model;
    const auto& got = regions[i] == 0 ? r.model.default_model : r.model.pieces[regions[i] - 1].model;
    CHECK(coefficient_distance(planted, got) < 1e-6);
  }
}

TEST_CASE("cas with m = 0 is a global fit") {
  const auto [data, truth] = generate_separable({60, 2, 1, 0.1, 1.0, 2});
  FitConfig cfg;
  cfg.m = 0;
  const auto r = cas_calr(data, cfg);
  CHECK(r.model.pieces.empty());
  CHECK(r.diagnostics.samples == 0);
  CHECK(coefficient_distance(r.model.default_model, lr(data)) < 1e-12);
}

TEST_CASE("cas reports an exhausted budget") {
  const auto [data, truth] = generate_separable({300, 2, 3, 0.01, 1.0, 6});
  FitConfig cfg;
  cfg.m = 3;
  cfg.max_samples = 3;
  CHECK_THROWS_AS(cas_calr(data, cfg), BudgetExhausted);
  try {
    cas_calr(data, cfg);
  } catch (const BudgetExhausted& e) {
    CHECK(e.partial().samples <= 3);
  }
}

TEST_CASE("cas on a single line cannot find a second function") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 40; ++i) {
    xs.push_back(i * 0.25);
    ys.push_back(1 + 0.5 * i * 0.25);
  }
  FitConfig cfg;
  cfg.m = 1;
  CHECK_THROWS_AS(cas_calr(make_1d(xs, ys), cfg), DiagnosticError);
}

TEST_CASE("cas areas isolate the rows of their function") {
  const auto [data, truth] = generate_separable({400, 2, 2, 0.0, 1.0, 8});
  FitConfig cfg;
  cfg.m = 2;
  cfg.seed = 1;
  const auto r = cas_calr(data, cfg);
  const double eps = r.diagnostics.epsilon;
  const auto unique = distinct_rows(r.diagnostics.functions, data, eps);
  for (const auto& p : r.model.pieces) {
    for (auto row : unique) {
      const bool own = fits(p.model, data, row, eps);
      CHECK(p.area.contains(data.point(row)) == own);
    }
  }
}

TEST_CASE("fit configuration validation") {
  const auto [data, truth] = generate_separable({100, 1, 1, 0.0, 1.0, 1});
  FitConfig bad;
  bad.tau = 0;
  CHECK_THROWS_AS(cas_calr(data, bad), InputError);
  FitConfig three;
  three.m = 3;
  CHECK_THROWS_AS(cas2(data, three), InputError);
  FitConfig tiny;
  tiny.sample_size = 1;
  CHECK_THROWS_AS(cas_calr(data, tiny), InputError);
  CHECK(default_sample_budget(2, 2) == 12800);
  CHECK(default_sample_budget(1, 1) == 1000);
}

TEST_CASE("cas2 is exact on noiseless data") {
  const auto [data, truth] = generate_separable({300, 2, 1, 0.0, 1.0, 12});
  FitConfig cfg;
  cfg.seed = 4;
  const auto r = cas2(data, cfg);
  CHECK(mse(r.model, data) <= 1e-16);
  CHECK(matches_planted(model_functions(r.model), truth, 1e-6));
}

TEST_CASE("cas2 agrees with cas under noise") {
  const auto [data, truth] = generate_separable({400, 2, 1, 0.05, 1.0, 13});
  FitConfig cfg;
  cfg.seed = 4;
  const auto a = cas2(data, cfg);
  const auto b = cas_calr(data, cfg);
  CHECK(mse(a.model, data) <= 4 * 0.05 * 0.05);
  const auto ra = assign_regions(a.model, data.x());
  const auto rb = assign_regions(b.model, data.x());
  std::size_t agree = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& fa = ra[i] == 0 ? a.model.default_model : a.model.pieces[ra[i] - 1].model;
    const auto& fb = rb[i] == 0 ? b.model.default_model : b.model.pieces[rb[i] - 1].model;
    agree += coefficient_distance(fa, fb) < 0.5 ? 1 : 0;
  }
  CHECK(static_cast<double>(agree) >= 0.95 * static_cast<double>(data.size()));
}

TEST_CASE("cas2 handles a piece surrounded by the default region") {
  // Box [4,6]^2 with one function, a ring of rows around it with another.
  Rng rng(44);
  const std::size_t n = 300;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < 60) {
      x(i, 0) = rng.uniform(4, 6);
      x(i, 1) = rng.uniform(4, 6);
      y(i) = 1 + 2 * x(i, 0) - x(i, 1);
    } else {
      do {
        x(i, 0) = rng.uniform(0, 10);
        x(i, 1) = rng.uniform(0, 10);
      } while (x(i, 0) > 3 && x(i, 0) < 7 && x(i, 1) > 3 && x(i, 1) < 7);
      y(i) = -2 + 0.5 * x(i, 0) + 3 * x(i, 1);
    }
  }
  const Dataset data(x, y);
  const LinearModel ring = make_linear(Eigen::Vector3d(-2, 0.5, 3));
  bool saw_branch = false;
  for (std::uint64_t seed = 0; seed < 20 && !saw_branch; ++seed) {
    FitConfig cfg;
    cfg.seed = seed;
    const auto r = cas2(data, cfg);
    CHECK(mse(r.model, data) <= 1e-16);
    if (coefficient_distance(r.diagnostics.functions[0], ring) < 1e-6) {
      CHECK(r.diagnostics.branch == "c1-none");
      REQUIRE(r.model.pieces.size() == 1);
      CHECK(coefficient_distance(r.model.default_model, ring) < 1e-6);
      saw_branch = true;
    } else {
      CHECK(r.diagnostics.branch == "c1");
    }
  }
  CHECK(saw_branch);
}

TEST_CASE("draw counts follow their expectation") {
  std::vector<std::size_t> labels(200);
  for (std::size_t i = 0; i < 200; ++i) labels[i] = i < 100 ? 0 : 1;
  const std::vector<std::size_t> groups{100, 100};
  const double expect = expected_draws_until_single_group(groups, 3);
  // P(pure) = 2 * C(100,3) / C(200,3)
  CHECK(expect == doctest::Approx(1.0 / (2.0 * 100 * 99 * 98 / (200.0 * 199 * 198))));
  Rng rng(45);
  double sum = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) sum += static_cast<double>(draws_until_single_group(labels, 3, rng));
  CHECK(std::abs(sum / trials - expect) < 0.25);
}

TEST_CASE("pldc with one term per side is one linear function") {
  PldcSpec s;
  s.plus = {{Eigen::Vector2d(1, 2), 3}};
  s.minus = {{Eigen::Vector2d(0.5, -1), 1}};
  const auto m = pldc_to_calf(s);
  CHECK(m.pieces.empty());
  CHECK(m.default_model.coeffs == Eigen::Vector3d(2, 0.5, 3));
}

TEST_CASE("pldc absolute value") {
  PldcSpec s;
  s.plus = {{Eigen::VectorXd::Constant(1, 1.0), 0}, {Eigen::VectorXd::Constant(1, -1.0), 0}};
  s.minus = {{Eigen::VectorXd::Constant(1, 0.0), 0}};
  const auto m = pldc_to_calf(s);
  for (double x : {-2.0, -0.5, 0.5, 2.0}) {
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, x);
    CHECK(predict(m, p) == doctest::Approx(std::abs(x)).epsilon(1e-12));
    CHECK(predict(m, p) == doctest::Approx(oracle::max_minus_max(s, p)).epsilon(1e-12));
  }
}

TEST_CASE("pldc conversion matches direct evaluation") {
  Rng rng(46);
  for (int t = 0; t < 10; ++t) {
    PldcSpec s;
    for (auto* side : {&s.plus, &s.minus}) {
      for (int k = 0; k < 2; ++k) side->push_back({Eigen::Vector2d(rng.uniform(-3, 3), rng.uniform(-3, 3)), rng.uniform(-3, 3)});
    }
    const auto m = pldc_to_calf(s);
    for (int i = 0; i < 1000; ++i) {
      const Eigen::Vector2d x(rng.uniform(-10, 10), rng.uniform(-10, 10));
      CHECK(std::abs(predict(m, x) - oracle::max_minus_max(s, x)) <= 1e-9);
    }
  }
}

TEST_CASE("pldc json round trip and errors") {
  PldcSpec s;
  s.plus = {{Eigen::Vector2d(1, 0), 0.5}, {Eigen::Vector2d(0, 1), -1}};
  s.minus = {{Eigen::Vector2d(0, 0), 0}};
  const auto back = pldc_from_json(nlohmann::json::parse(pldc_to_json(s).dump()));
  REQUIRE(back.plus.size() == 2);
  CHECK(back.plus[1].slope == s.plus[1].slope);
  CHECK(back.plus[0].offset == 0.5);
  CHECK_THROWS_AS(pldc_from_json(nlohmann::json::parse(R"({"plus":[]})")), InputError);
  PldcSpec mixed;
  mixed.plus = {{Eigen::Vector2d(1, 0), 0}};
  mixed.minus = {{Eigen::Vector3d(1, 0, 0), 0}};
  CHECK_THROWS_AS(pldc_to_calf(mixed), InputError);
}
