#include "calr/simplex.hpp"

#include <cmath>
#include <vector>

namespace calr::lp {

namespace {

constexpr double kPivotTol = 1e-11;

}  // namespace

std::optional<Eigen::VectorXd> find_nonnegative_solution(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                         double tolerance) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (m == 0) return Eigen::VectorXd::Zero(n);

  // Columns: n structural, m artificial, then the right-hand side.
  const Eigen::Index rhs = n + m;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    t.block(i + 1, 0, 1, n) = sign * a.row(i);
    t(i + 1, n + i) = 1.0;
    t(i + 1, rhs) = sign * b(i);
    basis[static_cast<std::size_t>(i)] = n + i;
  }
  // Row 0 holds reduced costs of "minimize the sum of artificials" and, in
  // the rhs column, minus the current objective.
  for (Eigen::Index i = 1; i <= m; ++i) {
    t.block(0, 0, 1, n) -= t.block(i, 0, 1, n);
    t(0, rhs) -= t(i, rhs);
  }

  const double scale = 1.0 + b.lpNorm<1>();
  const long max_pivots = 50L * (m + n) + 1000;
  for (long it = 0; it < max_pivots; ++it) {
    // Bland: lowest-index improving column.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (t(0, j) < -kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index i = 1; i <= m; ++i) {
      const double piv = t(i, enter);
      if (piv <= kPivotTol) continue;
      const double ratio = t(i, rhs) / piv;
      if (leave < 0 || ratio < best - 1e-15 ||
          (ratio <= best + 1e-15 && basis[static_cast<std::size_t>(i - 1)] < basis[static_cast<std::size_t>(leave - 1)])) {
        leave = i;
        best = ratio;
      }
    }
    // Phase one is bounded below by zero, so a column with no positive entry
    // cannot improve; treat it as optimal for that direction.
    if (leave < 0) {
      t(0, enter) = 0.0;
      continue;
    }

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t(i, enter);
      if (f != 0.0) t.row(i) -= f * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave - 1)] = enter;
  }

  const double infeasibility = -t(0, rhs);
  if (infeasibility > tolerance * scale) return std::nullopt;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index var = basis[static_cast<std::size_t>(i)];
    if (var < n) z(var) = std::max(0.0, t(i + 1, rhs));
  }
  return z;
}

std::optional<Eigen::VectorXd> find_feasible_point(const Eigen::MatrixXd& g, const Eigen::VectorXd& h,
                                                   double tolerance) {
  const Eigen::Index m = g.rows();
  const Eigen::Index d = g.cols();
  // x = p - q with p, q >= 0, plus one slack per row.
  Eigen::MatrixXd a(m, 2 * d + m);
  a.leftCols(d) = g;
  a.middleCols(d, d) = -g;
  a.rightCols(m).setIdentity();
  auto z = find_nonnegative_solution(a, h, tolerance);
  if (!z) return std::nullopt;
  return Eigen::VectorXd(z->head(d) - z->segment(d, d));
}

}  // namespace calr::lp
