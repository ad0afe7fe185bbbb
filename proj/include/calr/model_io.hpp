#pragma once

#include "calr/calf.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace calr {

inline constexpr int kModelSchemaVersion = 1;

// Planted model behind a synthetic dataset.
struct GroundTruth {
  CalfModel model;
  double noise_sigma = 0.0;
  double separation_delta = 0.0;
  double margin_epsilon = 0.0;
  // Per row: 0 = default region, i = pieces[i - 1].
  std::vector<std::size_t> assignments;
};

// Model document:
//   { "version": 1, "d": int,
//     "default": { "coeffs": [d+1 reals] },
//     "pieces": [ { "coeffs": [...], "area": [ { "alpha": [d reals], "gamma": real } ] } ] }
// Reals are written at round-trip precision.
nlohmann::ordered_json model_to_json(const CalfModel& model);
CalfModel model_from_json(const nlohmann::json& doc);

std::string dump_model(const CalfModel& model);
void save_model(const CalfModel& model, const std::filesystem::path& path);
CalfModel load_model(const std::filesystem::path& path);

// Model document plus "sigma", "delta", "epsilon" and "assignments".
nlohmann::ordered_json truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const nlohmann::json& doc);
void save_truth(const GroundTruth& truth, const std::filesystem::path& path);
GroundTruth load_truth(const std::filesystem::path& path);

// Writes text to path, throwing InputError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace calr
