#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace calr {

// Points are the rows of a matrix.
using PointSet = Eigen::MatrixXd;

// Membership slack: 1e-9 * (1 + |x|_inf).
double geometric_tolerance(const Eigen::Ref<const Eigen::VectorXd>& x);

// { x : alpha . x + gamma <= 0 }
struct HalfSpace {
  Eigen::VectorXd alpha;
  double gamma = 0.0;

  double eval(const Eigen::Ref<const Eigen::VectorXd>& x) const { return alpha.dot(x) + gamma; }
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const { return eval(x) <= geometric_tolerance(x); }
  std::size_t dim() const { return static_cast<std::size_t>(alpha.size()); }

  friend bool operator==(const HalfSpace& a, const HalfSpace& b) {
    return a.gamma == b.gamma && a.alpha.size() == b.alpha.size() && a.alpha == b.alpha;
  }
};

// Finite conjunction of half-spaces; the empty conjunction is all of R^d.
struct ConvexArea {
  std::vector<HalfSpace> halfspaces;

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  bool is_everything() const { return halfspaces.empty(); }

  friend bool operator==(const ConvexArea& a, const ConvexArea& b) { return a.halfspaces == b.halfspaces; }
};

// Indices of the rows of `points` that lie in `area`.
std::vector<std::size_t> members(const ConvexArea& area, const PointSet& points);

// True when the two areas share an interior-ish point, i.e. some x satisfies
// every half-space of both with slack -margin. Decided by LP.
bool areas_intersect(const ConvexArea& a, const ConvexArea& b, std::size_t dim, double margin = 0.0);

// Rows of `points` selected by `rows`.
PointSet select_rows(const PointSet& points, const std::vector<std::size_t>& rows);

}  // namespace calr
