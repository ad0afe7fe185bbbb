#pragma once

#include "calr/geometry.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace calr {

// Which routine builds convex areas inside the fitting algorithms.
enum class Separator { lp, svm };

std::string_view to_string(Separator s);
Separator parse_separator(std::string_view s);

// True iff x0 is a convex combination of the rows of `points`
// (sum lambda_i x_i = x0, sum lambda_i = 1, lambda >= 0), decided by
// phase-one simplex to tolerance 1e-9.
bool point_in_hull(const Eigen::Ref<const Eigen::VectorXd>& x0, const PointSet& points);

// Hyperplane strictly separating x0 from `points`, or nullopt when x0 lies in
// their convex hull. Solves w . (x_i - x0) <= -1 for all i, first by cyclic
// relaxation (projection onto violated constraints, at most 10 n d sweeps),
// then by simplex if relaxation stalls. The returned half-space puts its
// boundary midway between x0 and the nearest point, so every x_i evaluates
// <= -margin/2 and x0 evaluates >= +margin/2 (margin >= 1 in w units).
std::optional<HalfSpace> gslp(const Eigen::Ref<const Eigen::VectorXd>& x0, const PointSet& points);

struct SvmOptions {
  double c = 1e3;
  std::size_t max_iterations = 10000;
  double tolerance = 1e-10;
};

struct SvmResult {
  HalfSpace plane;  // positive class on the side alpha . x + gamma > 0
  double objective = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

// Linear soft-margin SVM: minimize 1/2 |alpha|^2 + C sum xi subject to
// y_i (alpha . x_i + gamma) >= 1 - xi_i, xi >= 0. Solved in the dual by
// sequential minimal optimization (maximal violating pair). If a training
// point lands exactly on the plane, gamma is shifted by 1e-9 * (1 + |gamma|)
// so that none does.
SvmResult svm_soft(const PointSet& positive, const PointSet& negative, const SvmOptions& options = {});

// Primal objective of the soft-margin problem for a given plane.
double svm_objective(const HalfSpace& plane, const PointSet& positive, const PointSet& negative, double c);

// Convex area containing every row of `inside` and no row of `outside`, or
// nullopt when some outside point lies in the convex hull of `inside`.
// One half-space per outside point that is not already cut off by an earlier
// half-space; outside points are visited nearest-to-centroid first.
std::optional<ConvexArea> cac(const PointSet& inside, const PointSet& outside);

// Subset form: `inside_rows` index the rows of `points`; every other row is
// outside.
std::optional<ConvexArea> cac(const PointSet& points, std::span<const std::size_t> inside_rows);

enum class CacsStatus { separated, not_separable, svm_failed };

struct CacsResult {
  CacsStatus status = CacsStatus::not_separable;
  std::optional<ConvexArea> area;
};

// Same contract as cac, built from one soft-margin SVM per outside point. A
// sign test on the SVM plane decides separability; when it fails at the given
// C, C is raised by 1e3 up to 1e12 before concluding the point is inside the
// hull. SVM non-convergence yields svm_failed.
CacsResult cacs(const PointSet& inside, const PointSet& outside, const SvmOptions& options = {});
CacsResult cacs(const PointSet& points, std::span<const std::size_t> inside_rows, const SvmOptions& options = {});

// Dispatch used by the fitting algorithms; svm failure maps to nullopt.
std::optional<ConvexArea> construct_area(Separator separator, const PointSet& inside, const PointSet& outside);

}  // namespace calr
