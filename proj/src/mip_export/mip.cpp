#include "calr/mip.hpp"

#include "calr/error.hpp"
#include "calr/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace calr {

using nlohmann::json;
using nlohmann::ordered_json;

std::size_t mip_local_model_variables(std::size_t d, std::size_t m, std::size_t k) { return (d + 1) * (k + 1) * m; }

std::size_t mip_constraint_count(std::size_t n, std::size_t m, std::size_t k) { return n * (m * (2 * k + 1) + 1); }

double default_mip_tau(const Dataset& data) { return -1e-6 * std::max(1.0, data.x().cwiseAbs().maxCoeff()); }

std::size_t MipInstance::beta_id(std::size_t j, std::size_t l) const { return j * (d + 1) + l; }

std::size_t MipInstance::alpha_id(std::size_t j, std::size_t kk, std::size_t l) const {
  return (m + 1) * (d + 1) + ((j - 1) * k + kk) * d + l;
}

std::size_t MipInstance::gamma_id(std::size_t j, std::size_t kk) const {
  return (m + 1) * (d + 1) + m * k * d + (j - 1) * k + kk;
}

std::size_t MipInstance::indicator_id(std::size_t i, std::size_t j, std::size_t kk) const {
  return (m + 1) * (d + 1) + m * k * (d + 1) + (i * m + (j - 1)) * k + kk;
}

std::size_t MipInstance::area_indicator_id(std::size_t i, std::size_t j) const {
  return (m + 1) * (d + 1) + m * k * (d + 1) + n * m * k + i * m + (j - 1);
}

bool operator==(const MipInstance& a, const MipInstance& b) {
  return a.n == b.n && a.d == b.d && a.m == b.m && a.k == b.k && a.tau == b.tau && a.x == b.x && a.y == b.y &&
         a.variables == b.variables && a.residuals == b.residuals && a.constraints == b.constraints;
}

namespace {

std::string indexed(const char* base, std::initializer_list<std::size_t> idx) {
  std::string s = base;
  for (auto v : idx) s += "[" + std::to_string(v) + "]";
  return s;
}

}  // namespace

MipInstance build_mip(const Dataset& data, std::size_t m, std::size_t k, std::optional<double> tau) {
  if (m < 1) throw InputError("mip: M must be at least 1");
  if (k < 1) throw InputError("mip: K must be at least 1");
  const double t = tau.value_or(default_mip_tau(data));
  if (!(t < 0.0) || !std::isfinite(t)) throw InputError("mip: tau must be negative");

  MipInstance mip;
  mip.n = data.size();
  mip.d = data.dim();
  mip.m = m;
  mip.k = k;
  mip.tau = t;
  mip.x = data.x();
  mip.y = data.y();
  const std::size_t n = mip.n, d = mip.d;

  for (std::size_t j = 0; j <= m; ++j)
    for (std::size_t l = 0; l <= d; ++l) mip.variables.push_back({indexed("beta", {j, l}), VarKind::continuous});
  for (std::size_t j = 1; j <= m; ++j)
    for (std::size_t kk = 0; kk < k; ++kk)
      for (std::size_t l = 0; l < d; ++l) mip.variables.push_back({indexed("alpha", {j, kk, l}), VarKind::continuous});
  for (std::size_t j = 1; j <= m; ++j)
    for (std::size_t kk = 0; kk < k; ++kk) mip.variables.push_back({indexed("gamma", {j, kk}), VarKind::continuous});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      for (std::size_t kk = 0; kk < k; ++kk) mip.variables.push_back({indexed("I", {i, j, kk}), VarKind::binary});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 1; j <= m; ++j) mip.variables.push_back({indexed("Iarea", {i, j}), VarKind::binary});

  auto xv = [&](std::size_t i, std::size_t l) {
    return l == 0 ? 1.0 : mip.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l - 1));
  };
  for (std::size_t i = 0; i < n; ++i) {
    MipExpression r;
    for (std::size_t l = 0; l <= d; ++l) r.terms.push_back({xv(i, l), {mip.beta_id(0, l)}});
    for (std::size_t j = 1; j <= m; ++j)
      for (std::size_t l = 0; l <= d; ++l) r.terms.push_back({xv(i, l), {mip.area_indicator_id(i, j), mip.beta_id(j, l)}});
    r.constant = -mip.y(static_cast<Eigen::Index>(i));
    mip.residuals.push_back(std::move(r));
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      for (std::size_t kk = 0; kk < k; ++kk) {
        const auto v = mip.indicator_id(i, j, kk);
        mip.constraints.push_back({"binary", {i, j, kk}, {{{1.0, {v}}, {-1.0, {v, v}}}, 0.0}, Sense::eq, 0.0});
      }
    }
    MipExpression sum;
    for (std::size_t j = 1; j <= m; ++j) sum.terms.push_back({1.0, {mip.area_indicator_id(i, j)}});
    mip.constraints.push_back({"disjoint", {i}, std::move(sum), Sense::le, 1.0});
    for (std::size_t j = 1; j <= m; ++j) {
      MipTerm prod{-1.0, {}};
      for (std::size_t kk = 0; kk < k; ++kk) prod.vars.push_back(mip.indicator_id(i, j, kk));
      mip.constraints.push_back({"product", {i, j}, {{{1.0, {mip.area_indicator_id(i, j)}}, prod}, 0.0}, Sense::eq, 0.0});
    }
    for (std::size_t j = 1; j <= m; ++j) {
      for (std::size_t kk = 0; kk < k; ++kk) {
        // (I - 1/2)(alpha . x + gamma) <= tau, expanded.
        const auto v = mip.indicator_id(i, j, kk);
        MipExpression e;
        for (std::size_t l = 0; l < d; ++l) {
          const double xl = xv(i, l + 1);
          e.terms.push_back({xl, {v, mip.alpha_id(j, kk, l)}});
          e.terms.push_back({-0.5 * xl, {mip.alpha_id(j, kk, l)}});
        }
        e.terms.push_back({1.0, {v, mip.gamma_id(j, kk)}});
        e.terms.push_back({-0.5, {mip.gamma_id(j, kk)}});
        mip.constraints.push_back({"halfspace", {i, j, kk}, std::move(e), Sense::le, t});
      }
    }
  }
  return mip;
}

namespace {

ordered_json expression_json(const MipExpression& e) {
  ordered_json terms = ordered_json::array();
  for (const auto& t : e.terms) terms.push_back(ordered_json{{"coef", t.coef}, {"vars", t.vars}});
  return ordered_json{{"terms", std::move(terms)}, {"constant", e.constant}};
}

MipExpression expression_from(const json& j) {
  MipExpression e;
  for (const auto& t : j.at("terms")) e.terms.push_back({t.at("coef").get<double>(), t.at("vars").get<std::vector<std::size_t>>()});
  e.constant = j.at("constant").get<double>();
  return e;
}

}  // namespace

ordered_json mip_to_json(const MipInstance& mip) {
  ordered_json doc;
  doc["format"] = "calr-mip";
  doc["version"] = kMipSchemaVersion;
  doc["comments"] = ordered_json::array(
      {"Indicators I and Iarea are 0/1; the binary family I(1 - I) = 0 enforces it. A {-1, 1} reading of I "
       "contradicts that family and is not used.",
       "Objective: minimize the sum over rows of residual^2; each residual is a polynomial in the variables.",
       "A term is coef times the product of the listed variable ids; ids may repeat.",
       "Local functions are added to beta[0], so beta[j] for j >= 1 holds an offset from the default."});
  doc["counts"] = ordered_json{{"n", mip.n},
                               {"d", mip.d},
                               {"M", mip.m},
                               {"K", mip.k},
                               {"variables", mip.variables.size()},
                               {"local_model_variables", mip_local_model_variables(mip.d, mip.m, mip.k)},
                               {"constraints", mip.constraints.size()}};
  doc["tau"] = mip.tau;
  ordered_json xs = ordered_json::array();
  for (Eigen::Index i = 0; i < mip.x.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index l = 0; l < mip.x.cols(); ++l) row.push_back(mip.x(i, l));
    xs.push_back(std::move(row));
  }
  ordered_json ys = ordered_json::array();
  for (Eigen::Index i = 0; i < mip.y.size(); ++i) ys.push_back(mip.y(i));
  doc["data"] = ordered_json{{"x", std::move(xs)}, {"y", std::move(ys)}};
  ordered_json vars = ordered_json::array();
  for (std::size_t v = 0; v < mip.variables.size(); ++v) {
    vars.push_back(ordered_json{{"id", v},
                                {"name", mip.variables[v].name},
                                {"type", mip.variables[v].kind == VarKind::binary ? "binary" : "continuous"}});
  }
  doc["variables"] = std::move(vars);
  ordered_json res = ordered_json::array();
  for (const auto& r : mip.residuals) res.push_back(expression_json(r));
  doc["objective"] = ordered_json{{"sense", "minimize"}, {"form", "sum_of_squares"}, {"residuals", std::move(res)}};
  ordered_json cons = ordered_json::array();
  for (const auto& c : mip.constraints) {
    ordered_json row;
    row["family"] = c.family;
    row["index"] = c.index;
    row["lhs"] = expression_json(c.lhs);
    row["sense"] = c.sense == Sense::eq ? "==" : "<=";
    row["rhs"] = c.rhs;
    cons.push_back(std::move(row));
  }
  doc["constraints"] = std::move(cons);
  return doc;
}

MipInstance mip_from_json(const json& doc) {
  try {
    if (doc.at("format") != "calr-mip") throw InputError("mip: not a calr-mip document");
    if (doc.at("version").get<int>() != kMipSchemaVersion) throw InputError("mip: unsupported schema version");
    MipInstance mip;
    const auto& counts = doc.at("counts");
    mip.n = counts.at("n").get<std::size_t>();
    mip.d = counts.at("d").get<std::size_t>();
    mip.m = counts.at("M").get<std::size_t>();
    mip.k = counts.at("K").get<std::size_t>();
    mip.tau = doc.at("tau").get<double>();
    const auto& xs = doc.at("data").at("x");
    const auto& ys = doc.at("data").at("y");
    mip.x.resize(static_cast<Eigen::Index>(mip.n), static_cast<Eigen::Index>(mip.d));
    mip.y.resize(static_cast<Eigen::Index>(mip.n));
    if (xs.size() != mip.n || ys.size() != mip.n) throw InputError("mip: data size disagrees with counts");
    for (std::size_t i = 0; i < mip.n; ++i) {
      if (xs[i].size() != mip.d) throw InputError("mip: data row has wrong dimension");
      for (std::size_t l = 0; l < mip.d; ++l) mip.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = xs[i][l].get<double>();
      mip.y(static_cast<Eigen::Index>(i)) = ys[i].get<double>();
    }
    for (const auto& v : doc.at("variables")) {
      mip.variables.push_back({v.at("name").get<std::string>(), v.at("type") == "binary" ? VarKind::binary : VarKind::continuous});
    }
    for (const auto& r : doc.at("objective").at("residuals")) mip.residuals.push_back(expression_from(r));
    for (const auto& c : doc.at("constraints")) {
      mip.constraints.push_back({c.at("family").get<std::string>(), c.at("index").get<std::vector<std::size_t>>(),
                                 expression_from(c.at("lhs")), c.at("sense") == "==" ? Sense::eq : Sense::le,
                                 c.at("rhs").get<double>()});
    }
    if (mip.constraints.size() != counts.at("constraints").get<std::size_t>() ||
        mip.variables.size() != counts.at("variables").get<std::size_t>()) {
      throw InputError("mip: header counts disagree with the body");
    }
    return mip;
  } catch (const json::exception& e) {
    throw InputError(std::string("mip: malformed document: ") + e.what());
  }
}

std::string dump_mip(const MipInstance& instance) { return mip_to_json(instance).dump(1) + "\n"; }

void export_mip(const MipInstance& instance, const std::filesystem::path& path) { write_text(path, dump_mip(instance)); }

MipInstance import_mip(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return mip_from_json(doc);
}

double evaluate(const MipExpression& expr, const std::vector<double>& values) {
  double total = expr.constant;
  for (const auto& t : expr.terms) {
    double v = t.coef;
    for (auto id : t.vars) v *= values.at(id);
    total += v;
  }
  return total;
}

double mip_objective(const MipInstance& instance, const std::vector<double>& values) {
  double total = 0.0;
  for (const auto& r : instance.residuals) {
    const double e = evaluate(r, values);
    total += e * e;
  }
  return total;
}

double mip_max_violation(const MipInstance& instance, const std::vector<double>& values) {
  double worst = 0.0;
  for (const auto& c : instance.constraints) {
    const double gap = evaluate(c.lhs, values) - c.rhs;
    worst = std::max(worst, c.sense == Sense::eq ? std::abs(gap) : gap);
  }
  return worst;
}

std::vector<double> mip_witness(const MipInstance& mip, const CalfModel& model) {
  if (model.d != mip.d) throw InputError("mip witness: model dimension differs from the instance");
  if (model.pieces.size() > mip.m) throw InputError("mip witness: model has more pieces than M");
  std::vector<double> values(mip.variables.size(), 0.0);
  const auto& base = model.default_model.coeffs;
  for (std::size_t l = 0; l <= mip.d; ++l) values[mip.beta_id(0, l)] = base(static_cast<Eigen::Index>(l));

  for (std::size_t j = 1; j <= mip.m; ++j) {
    std::vector<HalfSpace> planes;
    if (j <= model.pieces.size()) {
      const auto& piece = model.pieces[j - 1];
      if (piece.area.halfspaces.size() > mip.k) throw InputError("mip witness: an area has more than K half-spaces");
      for (std::size_t l = 0; l <= mip.d; ++l) {
        const auto li = static_cast<Eigen::Index>(l);
        values[mip.beta_id(j, l)] = piece.model.coeffs(li) - base(li);
      }
      planes = piece.area.halfspaces;
      // The whole space: 0 . x - 1 <= 0.
      if (planes.empty()) planes.push_back(HalfSpace{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mip.d)), -1.0});
    } else {
      // Nowhere: 0 . x + 1 <= 0.
      planes.push_back(HalfSpace{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mip.d)), 1.0});
    }
    while (planes.size() < mip.k) planes.push_back(planes.back());
    for (std::size_t kk = 0; kk < mip.k; ++kk) {
      for (std::size_t l = 0; l < mip.d; ++l) values[mip.alpha_id(j, kk, l)] = planes[kk].alpha(static_cast<Eigen::Index>(l));
      values[mip.gamma_id(j, kk)] = planes[kk].gamma;
    }
    for (std::size_t i = 0; i < mip.n; ++i) {
      double all = 1.0;
      for (std::size_t kk = 0; kk < mip.k; ++kk) {
        const double in = planes[kk].eval(mip.x.row(static_cast<Eigen::Index>(i)).transpose()) <= 0.0 ? 1.0 : 0.0;
        values[mip.indicator_id(i, j, kk)] = in;
        all *= in;
      }
      values[mip.area_indicator_id(i, j)] = all;
    }
  }
  return values;
}

}  // namespace calr
