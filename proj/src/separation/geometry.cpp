#include "calr/geometry.hpp"

#include "calr/error.hpp"
#include "calr/simplex.hpp"

namespace calr {

double geometric_tolerance(const Eigen::Ref<const Eigen::VectorXd>& x) {
  return 1e-9 * (1.0 + (x.size() ? x.lpNorm<Eigen::Infinity>() : 0.0));
}

bool ConvexArea::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  for (const auto& h : halfspaces)
    if (!h.contains(x)) return false;
  return true;
}

std::vector<std::size_t> members(const ConvexArea& area, const PointSet& points) {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    if (area.contains(points.row(i).transpose())) out.push_back(static_cast<std::size_t>(i));
  return out;
}

bool areas_intersect(const ConvexArea& a, const ConvexArea& b, std::size_t dim, double margin) {
  const std::size_t rows = a.halfspaces.size() + b.halfspaces.size();
  if (rows == 0) return true;
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), d);
  Eigen::VectorXd h(static_cast<Eigen::Index>(rows));
  Eigen::Index r = 0;
  for (const auto* area : {&a, &b}) {
    for (const auto& hs : area->halfspaces) {
      if (hs.alpha.size() != d) throw InputError("areas_intersect: dimension mismatch");
      g.row(r) = hs.alpha.transpose();
      h(r) = -hs.gamma - margin;
      ++r;
    }
  }
  return lp::find_feasible_point(g, h).has_value();
}

PointSet select_rows(const PointSet& points, const std::vector<std::size_t>& rows) {
  PointSet out(static_cast<Eigen::Index>(rows.size()), points.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = points.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace calr
