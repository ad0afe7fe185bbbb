#pragma once

#include "calr/calf.hpp"

#include <json.hpp>

#include <vector>

namespace calr {

struct AffineTerm {
  Eigen::VectorXd slope;
  double offset = 0.0;
};

// f(x) = max_k (a_k . x + c_k) - max_k (b_k . x + c'_k)
struct PldcSpec {
  std::vector<AffineTerm> plus;
  std::vector<AffineTerm> minus;

  // Throws InputError unless both lists are nonempty with one shared dimension.
  std::size_t validate() const;
};

double evaluate(const PldcSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

// One piece per (i, j) pair: g_ij = (a_i - b_j) . x + c_i - c'_j on the area
// where term i attains the plus maximum and term j the minus maximum. Pieces
// whose area is empty by a constant contradiction are dropped. g_11 is the
// default; a spec with a single term on each side becomes a default-only
// model.
CalfModel pldc_to_calf(const PldcSpec& spec);

// { "plus": [ { "a": [...], "c": r } ], "minus": [ ... ] }
PldcSpec pldc_from_json(const nlohmann::json& doc);
nlohmann::ordered_json pldc_to_json(const PldcSpec& spec);

}  // namespace calr
