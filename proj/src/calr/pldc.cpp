#include "calr/pldc.hpp"

#include "calr/error.hpp"

#include <algorithm>
#include <limits>

namespace calr {

std::size_t PldcSpec::validate() const {
  if (plus.empty() || minus.empty()) throw InputError("pldc: both term lists must be nonempty");
  const auto d = plus.front().slope.size();
  if (d < 1) throw InputError("pldc: terms need dimension >= 1");
  for (const auto* side : {&plus, &minus})
    for (const auto& t : *side)
      if (t.slope.size() != d) throw InputError("pldc: terms disagree on dimension");
  return static_cast<std::size_t>(d);
}

namespace {

double max_affine(const std::vector<AffineTerm>& terms, const Eigen::Ref<const Eigen::VectorXd>& x) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) best = std::max(best, t.slope.dot(x) + t.offset);
  return best;
}

// Region where terms[i] attains the maximum; false if it is empty for a
// constant reason (identical slope, larger offset elsewhere).
bool argmax_region(const std::vector<AffineTerm>& terms, std::size_t i, std::vector<HalfSpace>& out) {
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (k == i) continue;
    Eigen::VectorXd alpha = terms[k].slope - terms[i].slope;
    const double gamma = terms[k].offset - terms[i].offset;
    if (alpha.isZero(0.0)) {
      if (gamma > 0.0) return false;
      continue;
    }
    out.push_back(HalfSpace{std::move(alpha), gamma});
  }
  return true;
}

}  // namespace

double evaluate(const PldcSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return max_affine(spec.plus, x) - max_affine(spec.minus, x);
}

CalfModel pldc_to_calf(const PldcSpec& spec) {
  const std::size_t d = spec.validate();
  auto coeffs = [&](std::size_t i, std::size_t j) {
    Eigen::VectorXd beta(static_cast<Eigen::Index>(d + 1));
    beta(0) = spec.plus[i].offset - spec.minus[j].offset;
    beta.tail(static_cast<Eigen::Index>(d)) = spec.plus[i].slope - spec.minus[j].slope;
    return make_linear(std::move(beta));
  };

  CalfModel model;
  model.d = d;
  model.default_model = coeffs(0, 0);
  for (std::size_t i = 0; i < spec.plus.size(); ++i) {
    std::vector<HalfSpace> plus_area;
    if (!argmax_region(spec.plus, i, plus_area)) continue;
    for (std::size_t j = 0; j < spec.minus.size(); ++j) {
      std::vector<HalfSpace> area = plus_area;
      if (!argmax_region(spec.minus, j, area)) continue;
      model.pieces.push_back(Piece{coeffs(i, j), ConvexArea{std::move(area)}});
    }
  }
  // An unconstrained piece covers everything: it is the whole function.
  for (const auto& p : model.pieces) {
    if (p.area.is_everything()) {
      model.default_model = p.model;
      model.pieces.clear();
      break;
    }
  }
  return model;
}

namespace {

std::vector<AffineTerm> terms_from_json(const nlohmann::json& arr, const char* side) {
  if (!arr.is_array()) throw InputError(std::string("pldc: '") + side + "' must be an array");
  std::vector<AffineTerm> out;
  for (const auto& t : arr) {
    if (!t.is_object() || !t.contains("a") || !t.contains("c") || !t["a"].is_array() || !t["c"].is_number()) {
      throw InputError(std::string("pldc: each '") + side + "' term needs an array 'a' and a number 'c'");
    }
    AffineTerm term;
    term.slope.resize(static_cast<Eigen::Index>(t["a"].size()));
    for (std::size_t k = 0; k < t["a"].size(); ++k) {
      if (!t["a"][k].is_number()) throw InputError("pldc: slopes must be numbers");
      term.slope(static_cast<Eigen::Index>(k)) = t["a"][k].get<double>();
    }
    term.offset = t["c"].get<double>();
    out.push_back(std::move(term));
  }
  return out;
}

}  // namespace

PldcSpec pldc_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("plus") || !doc.contains("minus")) {
    throw InputError("pldc: document needs 'plus' and 'minus'");
  }
  PldcSpec spec{terms_from_json(doc["plus"], "plus"), terms_from_json(doc["minus"], "minus")};
  spec.validate();
  return spec;
}

nlohmann::ordered_json pldc_to_json(const PldcSpec& spec) {
  auto side = [](const std::vector<AffineTerm>& terms) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& t : terms) {
      nlohmann::ordered_json a = nlohmann::ordered_json::array();
      for (Eigen::Index k = 0; k < t.slope.size(); ++k) a.push_back(t.slope(k));
      arr.push_back(nlohmann::ordered_json{{"a", a}, {"c", t.offset}});
    }
    return arr;
  };
  return nlohmann::ordered_json{{"plus", side(spec.plus)}, {"minus", side(spec.minus)}};
}

}  // namespace calr
