#include "calr/linreg.hpp"

#include "calr/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace calr {

namespace {

constexpr double kRankCutoff = 1e-10;

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  return a;
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InputError("incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fastest for x < (a + 1) / (a + b + 2); use the
  // symmetry I_x(a, b) = 1 - I_{1-x}(b, a) on the other side.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw InputError("f_distribution_sf: degrees of freedom must be positive");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
  const double x = d2 / (d2 + d1 * f);
  return std::clamp(incomplete_beta(d2 / 2.0, d1 / 2.0, x), 0.0, 1.0);
}

std::size_t design_rank(const Eigen::MatrixXd& x) {
  if (x.rows() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design_matrix(x));
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > kRankCutoff * s(0)) ++r;
  return r;
}

LinearModel lr(const Dataset& data) {
  const Eigen::MatrixXd a = design_matrix(data.x());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankCutoff);
  LinearModel m;
  m.coeffs = svd.solve(data.y());
  m.n_fit = data.size();
  m.mse = mse(m, data);
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  m.p_value = n > d + 1 ? f_test_pvalue(m, data) : 1.0;
  return m;
}

double predict_linear(const LinearModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() + 1 != model.coeffs.size()) {
    throw InputError("predict_linear: point has dimension " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(model.coeffs.size() - 1));
  }
  return model.coeffs(0) + model.coeffs.tail(x.size()).dot(x);
}

Eigen::VectorXd residuals(const LinearModel& model, const Dataset& data) {
  if (data.dim() + 1 != static_cast<std::size_t>(model.coeffs.size())) {
    throw InputError("residuals: dataset dimension does not match model");
  }
  const Eigen::Index d = static_cast<Eigen::Index>(data.dim());
  Eigen::VectorXd fitted = (data.x() * model.coeffs.tail(d)).array() + model.coeffs(0);
  return data.y() - fitted;
}

double mse(const LinearModel& model, const Dataset& data) {
  return residuals(model, data).squaredNorm() / static_cast<double>(data.size());
}

double f_test_pvalue(const LinearModel& model, const Dataset& data) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (n <= d + 1) {
    throw InputError("f_test_pvalue: insufficient degrees of freedom (n=" + std::to_string(n) +
                     ", d=" + std::to_string(d) + ")");
  }
  const Eigen::VectorXd r = residuals(model, data);
  const Eigen::VectorXd fitted = data.y() - r;
  const double y_mean = data.y().mean();
  const double sst = (data.y().array() - y_mean).square().sum();
  const double ssr = (fitted.array() - y_mean).square().sum();
  const double sse = r.squaredNorm();

  // Exact-zero tests on accumulated sums are meaningless; compare against the
  // total variation at a level just above double rounding.
  constexpr double kZero = 1e-26;
  const double scale = std::max(sst, (data.y().array().square().sum()) * std::numeric_limits<double>::epsilon());
  if (sst == 0.0 || ssr <= kZero * scale) return 1.0;
  if (sse <= kZero * scale) return 0.0;

  const double d1 = static_cast<double>(d);
  const double d2 = static_cast<double>(n - d - 1);
  const double f = (ssr / d1) / (sse / d2);
  return f_distribution_sf(f, d1, d2);
}

double coefficient_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InputError("coefficient_distance: dimension mismatch");
  return (a - b).norm();
}

double coefficient_distance(const LinearModel& a, const LinearModel& b) {
  return coefficient_distance(a.coeffs, b.coeffs);
}

}  // namespace calr
