#include "calr/model_io.hpp"

#include "calr/error.hpp"

#include <fstream>
#include <sstream>

namespace calr {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) throw InputError(std::string("model: '") + what + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw InputError(std::string("model: '") + what + "' must hold numbers");
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw InputError(std::string("model: missing field '") + key + "'");
  return obj.at(key);
}

}  // namespace

ordered_json model_to_json(const CalfModel& model) {
  model.validate();
  ordered_json doc;
  doc["version"] = kModelSchemaVersion;
  doc["d"] = model.d;
  doc["default"] = ordered_json{{"coeffs", vector_to_json(model.default_model.coeffs)}};
  ordered_json pieces = ordered_json::array();
  for (const auto& p : model.pieces) {
    ordered_json area = ordered_json::array();
    for (const auto& h : p.area.halfspaces) {
      ordered_json hs;
      hs["alpha"] = vector_to_json(h.alpha);
      hs["gamma"] = h.gamma;
      area.push_back(std::move(hs));
    }
    ordered_json piece;
    piece["coeffs"] = vector_to_json(p.model.coeffs);
    piece["area"] = std::move(area);
    pieces.push_back(std::move(piece));
  }
  doc["pieces"] = std::move(pieces);
  return doc;
}

CalfModel model_from_json(const json& doc) {
  const json& version = field(doc, "version");
  if (!version.is_number_integer() || version.get<int>() != kModelSchemaVersion) {
    throw InputError("model: unsupported schema version " + version.dump());
  }
  const json& d = field(doc, "d");
  if (!d.is_number_integer() || d.get<long long>() < 1) throw InputError("model: 'd' must be a positive integer");

  CalfModel model;
  model.d = d.get<std::size_t>();
  model.default_model = make_linear(vector_from_json(field(field(doc, "default"), "coeffs"), "coeffs"));
  const json& pieces = field(doc, "pieces");
  if (!pieces.is_array()) throw InputError("model: 'pieces' must be an array");
  for (const auto& p : pieces) {
    Piece piece;
    piece.model = make_linear(vector_from_json(field(p, "coeffs"), "coeffs"));
    const json& area = field(p, "area");
    if (!area.is_array()) throw InputError("model: 'area' must be an array");
    for (const auto& h : area) {
      const json& gamma = field(h, "gamma");
      if (!gamma.is_number()) throw InputError("model: 'gamma' must be a number");
      piece.area.halfspaces.push_back(HalfSpace{vector_from_json(field(h, "alpha"), "alpha"), gamma.get<double>()});
    }
    model.pieces.push_back(std::move(piece));
  }
  model.validate();
  return model;
}

std::string dump_model(const CalfModel& model) { return model_to_json(model).dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path.string());
  out << text;
  if (!out) throw InputError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

json parse_json(const std::string& text, const std::filesystem::path& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace

void save_model(const CalfModel& model, const std::filesystem::path& path) { write_text(path, dump_model(model)); }

CalfModel load_model(const std::filesystem::path& path) { return model_from_json(parse_json(read_text(path), path)); }

ordered_json truth_to_json(const GroundTruth& truth) {
  ordered_json doc = model_to_json(truth.model);
  doc["sigma"] = truth.noise_sigma;
  doc["delta"] = truth.separation_delta;
  doc["epsilon"] = truth.margin_epsilon;
  doc["assignments"] = truth.assignments;
  return doc;
}

GroundTruth truth_from_json(const json& doc) {
  GroundTruth t;
  t.model = model_from_json(doc);
  t.noise_sigma = field(doc, "sigma").get<double>();
  t.separation_delta = field(doc, "delta").get<double>();
  t.margin_epsilon = doc.contains("epsilon") ? doc.at("epsilon").get<double>() : 0.0;
  t.assignments = field(doc, "assignments").get<std::vector<std::size_t>>();
  for (auto a : t.assignments)
    if (a > t.model.pieces.size()) throw InputError("truth: assignment index out of range");
  return t;
}

void save_truth(const GroundTruth& truth, const std::filesystem::path& path) {
  write_text(path, truth_to_json(truth).dump(2) + "\n");
}

GroundTruth load_truth(const std::filesystem::path& path) { return truth_from_json(parse_json(read_text(path), path)); }

}  // namespace calr
