#pragma once

#include <Eigen/Dense>

#include <optional>

namespace calr::lp {

// Phase-one simplex: finds z >= 0 with A z = b, or reports infeasibility.
// Dense tableau with Bland's rule; meant for the small systems that arise
// from separating one point from a point set.
//
// `tolerance` bounds the residual sum of artificial variables accepted as
// feasible, relative to 1 + |b|_1.
std::optional<Eigen::VectorXd> find_nonnegative_solution(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                         double tolerance = 1e-9);

// Finds x (free) with G x <= h, or reports infeasibility.
std::optional<Eigen::VectorXd> find_feasible_point(const Eigen::MatrixXd& g, const Eigen::VectorXd& h,
                                                   double tolerance = 1e-9);

}  // namespace calr::lp
