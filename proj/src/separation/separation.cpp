#include "calr/separation.hpp"

#include "calr/error.hpp"
#include "calr/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace calr {

std::string_view to_string(Separator s) { return s == Separator::lp ? "lp" : "svm"; }

Separator parse_separator(std::string_view s) {
  if (s == "lp") return Separator::lp;
  if (s == "svm") return Separator::svm;
  throw InputError("unknown separator '" + std::string(s) + "' (expected lp or svm)");
}

namespace {

void require_dim(Eigen::Index got, Eigen::Index want, const char* where) {
  if (got != want) {
    throw InputError(std::string(where) + ": dimension mismatch (" + std::to_string(got) + " vs " +
                     std::to_string(want) + ")");
  }
}

// Cyclic projection for w . a_i <= -1. Returns nullopt when the sweep budget
// runs out or the iterate blows up.
std::optional<Eigen::VectorXd> relaxation_solve(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index d = a.cols();
  const long max_sweeps = 10L * n * d;
  constexpr double kOverRelax = 1.5;
  Eigen::VectorXd norms2 = a.rowwise().squaredNorm();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = a.row(i).dot(w) + 1.0;
      if (v > 0.0) {
        w -= (kOverRelax * v / norms2(i)) * a.row(i).transpose();
        changed = true;
      }
    }
    if (!changed) return w;
    if (!w.allFinite() || w.norm() > 1e15) return std::nullopt;
  }
  return std::nullopt;
}

// Orders outside points by distance to the centroid of the inside set so
// that near points, whose half-spaces tend to cut off far ones, go first.
std::vector<Eigen::Index> visiting_order(const PointSet& inside, const PointSet& outside) {
  const Eigen::RowVectorXd centroid = inside.colwise().mean();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(outside.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<double> dist(order.size());
  for (Eigen::Index i = 0; i < outside.rows(); ++i) dist[static_cast<std::size_t>(i)] = (outside.row(i) - centroid).squaredNorm();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return dist[static_cast<std::size_t>(l)] < dist[static_cast<std::size_t>(r)]; });
  return order;
}

void split_rows(const PointSet& points, std::span<const std::size_t> inside_rows, PointSet& inside, PointSet& outside) {
  std::vector<char> is_inside(static_cast<std::size_t>(points.rows()), 0);
  for (auto r : inside_rows) {
    if (r >= static_cast<std::size_t>(points.rows())) throw InputError("cac: subset row out of range");
    is_inside[r] = 1;
  }
  std::vector<std::size_t> in, out;
  for (std::size_t i = 0; i < is_inside.size(); ++i) (is_inside[i] ? in : out).push_back(i);
  inside = select_rows(points, in);
  outside = select_rows(points, out);
}

}  // namespace

bool point_in_hull(const Eigen::Ref<const Eigen::VectorXd>& x0, const PointSet& points) {
  if (points.rows() == 0) throw InputError("point_in_hull: empty point set");
  require_dim(x0.size(), points.cols(), "point_in_hull");
  const Eigen::Index d = points.cols();
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd a(d + 1, n);
  a.topRows(d) = points.transpose();
  a.row(d).setOnes();
  Eigen::VectorXd b(d + 1);
  b.head(d) = x0;
  b(d) = 1.0;
  return lp::find_nonnegative_solution(a, b, 1e-9).has_value();
}

std::optional<HalfSpace> gslp(const Eigen::Ref<const Eigen::VectorXd>& x0, const PointSet& points) {
  require_dim(x0.size(), points.cols(), "gslp");
  if (points.rows() == 0) throw InputError("gslp: empty point set");
  const Eigen::MatrixXd a = points.rowwise() - x0.transpose();
  const double scale = 1.0 + x0.lpNorm<Eigen::Infinity>();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    if (a.row(i).lpNorm<Eigen::Infinity>() <= 1e-15 * scale) return std::nullopt;  // x0 is one of the points

  std::optional<Eigen::VectorXd> w = relaxation_solve(a);
  if (!w) {
    w = lp::find_feasible_point(a, Eigen::VectorXd::Constant(a.rows(), -1.0));
    if (!w) return std::nullopt;
  }
  const double w_norm = w->norm();
  if (!(w_norm > 0.0)) return std::nullopt;

  const double at_x0 = w->dot(x0);
  const double nearest = (points * *w).maxCoeff();
  if (!(nearest < at_x0)) return std::nullopt;
  HalfSpace h;
  h.alpha = *w / w_norm;
  h.gamma = -0.5 * (nearest + at_x0) / w_norm;
  return h;
}

double svm_objective(const HalfSpace& plane, const PointSet& positive, const PointSet& negative, double c) {
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < positive.rows(); ++i) hinge += std::max(0.0, 1.0 - plane.eval(positive.row(i).transpose()));
  for (Eigen::Index i = 0; i < negative.rows(); ++i) hinge += std::max(0.0, 1.0 + plane.eval(negative.row(i).transpose()));
  return 0.5 * plane.alpha.squaredNorm() + c * hinge;
}

SvmResult svm_soft(const PointSet& positive, const PointSet& negative, const SvmOptions& options) {
  if (positive.rows() == 0 || negative.rows() == 0) throw InputError("svm_soft: both classes must be nonempty");
  require_dim(negative.cols(), positive.cols(), "svm_soft");
  if (!(options.c > 0.0)) throw InputError("svm_soft: C must be positive");

  const Eigen::Index np = positive.rows();
  const Eigen::Index n = np + negative.rows();
  PointSet x(n, positive.cols());
  x.topRows(np) = positive;
  x.bottomRows(negative.rows()) = negative;
  Eigen::VectorXd y(n);
  y.head(np).setOnes();
  y.tail(negative.rows()).setConstant(-1.0);

  const Eigen::MatrixXd kernel = x * x.transpose();
  const Eigen::MatrixXd q = (y * y.transpose()).cwiseProduct(kernel);
  const double c = options.c;
  constexpr double kTau = 1e-12;

  Eigen::VectorXd lam = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  SvmResult result;
  std::size_t iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y(t) > 0) {
        if (lam(t) < c && -grad(t) >= gmax) { gmax = -grad(t); i = t; }
      } else {
        if (lam(t) > 0 && grad(t) >= gmax) { gmax = grad(t); i = t; }
      }
    }
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y(t) > 0) {
        if (lam(t) > 0 && grad(t) >= gmax2) { gmax2 = grad(t); j = t; }
      } else {
        if (lam(t) < c && -grad(t) >= gmax2) { gmax2 = -grad(t); j = t; }
      }
    }
    const double scale = 1.0 + grad.lpNorm<Eigen::Infinity>();
    if (i < 0 || j < 0 || gmax + gmax2 < options.tolerance * scale) {
      result.converged = true;
      break;
    }

    const double old_i = lam(i), old_j = lam(j);
    if (y(i) != y(j)) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = lam(i) - lam(j);
      lam(i) += delta;
      lam(j) += delta;
      if (diff > 0) {
        if (lam(j) < 0) { lam(j) = 0; lam(i) = diff; }
      } else {
        if (lam(i) < 0) { lam(i) = 0; lam(j) = -diff; }
      }
      if (diff > 0) {
        if (lam(i) > c) { lam(i) = c; lam(j) = c - diff; }
      } else {
        if (lam(j) > c) { lam(j) = c; lam(i) = c + diff; }
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = lam(i) + lam(j);
      lam(i) -= delta;
      lam(j) += delta;
      if (sum > c) {
        if (lam(i) > c) { lam(i) = c; lam(j) = sum - c; }
      } else {
        if (lam(j) < 0) { lam(j) = 0; lam(i) = sum; }
      }
      if (sum > c) {
        if (lam(j) > c) { lam(j) = c; lam(i) = sum - c; }
      } else {
        if (lam(i) < 0) { lam(i) = 0; lam(j) = sum; }
      }
    }
    const double di = lam(i) - old_i, dj = lam(j) - old_j;
    grad += q.col(i) * di + q.col(j) * dj;
  }
  result.iterations = iter;

  // Offset from the KKT conditions: average over free multipliers, else the
  // midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (lam(t) >= c) {
      if (y(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lam(t) <= 0) {
      if (y(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  if (!std::isfinite(rho)) rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);

  result.plane.alpha = x.transpose() * lam.cwiseProduct(y);
  result.plane.gamma = -rho;

  // No training point may sit exactly on the plane.
  for (int attempt = 0; attempt < 8; ++attempt) {
    bool on_plane = false;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (std::fabs(result.plane.eval(x.row(t).transpose())) < 1e-12 * (1.0 + std::fabs(result.plane.gamma))) {
        on_plane = true;
        break;
      }
    }
    if (!on_plane) break;
    result.plane.gamma += 1e-9 * (1.0 + std::fabs(result.plane.gamma));
  }
  result.objective = svm_objective(result.plane, positive, negative, c);
  return result;
}

std::optional<ConvexArea> cac(const PointSet& inside, const PointSet& outside) {
  if (inside.rows() == 0) throw InputError("cac: inside set must be nonempty");
  if (outside.rows() > 0) require_dim(outside.cols(), inside.cols(), "cac");
  ConvexArea area;
  for (Eigen::Index idx : visiting_order(inside, outside)) {
    const Eigen::VectorXd u = outside.row(idx).transpose();
    if (!area.contains(u)) continue;  // already cut off
    auto h = gslp(u, inside);
    if (!h) return std::nullopt;
    if (h->eval(u) <= 0.0) {
      h->alpha = -h->alpha;
      h->gamma = -h->gamma;
    }
    area.halfspaces.push_back(std::move(*h));
  }
  return area;
}

std::optional<ConvexArea> cac(const PointSet& points, std::span<const std::size_t> inside_rows) {
  PointSet inside, outside;
  split_rows(points, inside_rows, inside, outside);
  return cac(inside, outside);
}

CacsResult cacs(const PointSet& inside, const PointSet& outside, const SvmOptions& options) {
  if (inside.rows() == 0) throw InputError("cacs: inside set must be nonempty");
  if (outside.rows() > 0) require_dim(outside.cols(), inside.cols(), "cacs");
  constexpr double kMaxC = 1e12;

  CacsResult result;
  ConvexArea area;
  for (Eigen::Index idx : visiting_order(inside, outside)) {
    const Eigen::VectorXd u = outside.row(idx).transpose();
    if (!area.contains(u)) continue;

    SvmOptions opts = options;
    bool separated = false;
    bool converged = false;
    HalfSpace plane;
    while (true) {
      const SvmResult svm = svm_soft(inside, outside.row(idx), opts);
      converged = svm.converged;
      plane = svm.plane;
      const double at_u = plane.eval(u);
      separated = at_u < 0.0;
      for (Eigen::Index k = 0; separated && k < inside.rows(); ++k)
        if (plane.eval(inside.row(k).transpose()) * at_u >= 0.0) separated = false;
      if (separated || opts.c >= kMaxC) break;
      opts.c = std::min(kMaxC, opts.c * 1e3);
    }
    if (!separated) {
      // A stalled solver is only a failure when the point is really outside
      // the hull.
      result.status = converged || point_in_hull(u, inside) ? CacsStatus::not_separable : CacsStatus::svm_failed;
      return result;
    }
    // Inside points are the positive class; flip so they satisfy <= 0.
    HalfSpace h{-plane.alpha, -plane.gamma};
    area.halfspaces.push_back(std::move(h));
  }
  result.status = CacsStatus::separated;
  result.area = std::move(area);
  return result;
}

CacsResult cacs(const PointSet& points, std::span<const std::size_t> inside_rows, const SvmOptions& options) {
  PointSet inside, outside;
  split_rows(points, inside_rows, inside, outside);
  return cacs(inside, outside, options);
}

std::optional<ConvexArea> construct_area(Separator separator, const PointSet& inside, const PointSet& outside) {
  if (separator == Separator::lp) return cac(inside, outside);
  return cacs(inside, outside).area;
}

}  // namespace calr
