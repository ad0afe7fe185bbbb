#pragma once

#include "calr/dataset.hpp"
#include "calr/geometry.hpp"
#include "calr/linreg.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace calr {

struct Piece {
  LinearModel model;
  ConvexArea area;
};

// Convex-area-wise linear function: pieces are tried in order and the first
// whose area contains x supplies the value; the default model covers the
// complement of all piece areas.
struct CalfModel {
  std::size_t d = 0;
  LinearModel default_model;
  std::vector<Piece> pieces;

  // Throws InputError on any dimension disagreement.
  void validate() const;

  // Index of the governing piece, or nullopt for the default region.
  std::optional<std::size_t> locate(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // Coefficient-and-area equality (fit statistics are not compared).
  friend bool operator==(const CalfModel& a, const CalfModel& b);
};

double predict(const CalfModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd predict_all(const CalfModel& model, const Eigen::MatrixXd& x);

double mse(const CalfModel& model, const Dataset& data);
double total_squared_error(const CalfModel& model, const Dataset& data);

// Decision form: true iff mse(model, data) < bound.
bool decide_calr(const Dataset& data, const CalfModel& model, double bound);

// Region label per row: 0 for default, i + 1 for pieces[i].
std::vector<std::size_t> assign_regions(const CalfModel& model, const Eigen::MatrixXd& x);

// Wraps bare coefficients as a LinearModel (stats left at their defaults).
LinearModel make_linear(Eigen::VectorXd coeffs);

}  // namespace calr
