#pragma once

#include "calr/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace calr {

// Default significance threshold for the F-test gate.
inline constexpr double kDefaultTau = 0.05;

// beta . (1, x): coeffs(0) is the intercept.
struct LinearModel {
  Eigen::VectorXd coeffs;
  double mse = 0.0;
  double p_value = 1.0;
  std::size_t n_fit = 0;

  std::size_t dim() const { return static_cast<std::size_t>(coeffs.size()) - 1; }
};

// Least squares through the pseudo-inverse. The design matrix [1 X] is
// factored by SVD; singular values below 1e-10 * sigma_max are dropped, so
// rank-deficient inputs get the minimum-norm solution. mse and p_value are
// filled in (p_value = 1 when n <= d + 1).
LinearModel lr(const Dataset& data);

// Numerical rank of [1 X] under the same cutoff lr uses.
std::size_t design_rank(const Eigen::MatrixXd& x);

double predict_linear(const LinearModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

// Residual y_i - f(x_i) for every row.
Eigen::VectorXd residuals(const LinearModel& model, const Dataset& data);

double mse(const LinearModel& model, const Dataset& data);

// Overall-regression F-test: F = (SSR/d) / (SSE/(n-d-1)) against F(d, n-d-1).
// Returns 0 when SSE vanishes and 1 when SSR vanishes. Requires n > d + 1.
double f_test_pvalue(const LinearModel& model, const Dataset& data);

// Upper tail P(F > f) of the F(d1, d2) distribution.
double f_distribution_sf(double f, double d1, double d2);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Euclidean distance between full coefficient vectors (intercept included).
double coefficient_distance(const LinearModel& a, const LinearModel& b);
double coefficient_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace calr
