#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace calr {

// Rows of (x, y). x is stored row-wise in an n x d matrix.
class Dataset {
 public:
  Dataset() = default;

  // Validates: n >= 1, d >= 1, matching row counts, all values finite.
  // column_names, when non-empty, holds d feature names followed by the
  // target name.
  Dataset(Eigen::MatrixXd x, Eigen::VectorXd y, std::vector<std::string> column_names = {});

  std::size_t size() const { return static_cast<std::size_t>(x_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(x_.cols()); }

  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  const std::vector<std::string>& column_names() const { return column_names_; }

  Eigen::VectorXd point(std::size_t i) const { return x_.row(static_cast<Eigen::Index>(i)).transpose(); }
  double target(std::size_t i) const { return y_(static_cast<Eigen::Index>(i)); }

  // Rows listed in `rows`, in that order.
  Dataset subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  std::vector<std::string> column_names_;
};

// Comma-delimited, one header row, numeric body. `target_column` empty means
// the last column. Features are the remaining columns in header order.
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column = {});
Dataset parse_csv(const std::string& text, const std::string& target_column = {});

// Writes features then target, reals at round-trip precision.
void write_csv(const Dataset& data, const std::filesystem::path& path);
std::string format_csv(const Dataset& data);

// Feature-only table (no target), used by the predict command.
Eigen::MatrixXd load_feature_csv(const std::filesystem::path& path, std::vector<std::string>* header = nullptr);

// Shortest decimal form that parses back to the same double.
std::string format_real(double v);

}  // namespace calr
