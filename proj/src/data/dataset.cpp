#include "calr/dataset.hpp"

#include "calr/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace calr {

Dataset::Dataset(Eigen::MatrixXd x, Eigen::VectorXd y, std::vector<std::string> column_names)
    : x_(std::move(x)), y_(std::move(y)), column_names_(std::move(column_names)) {
  if (x_.rows() < 1) throw InputError("dataset: at least one row required");
  if (x_.cols() < 1) throw InputError("dataset: at least one feature column required");
  if (y_.size() != x_.rows()) throw InputError("dataset: feature and target row counts differ");
  if (!x_.allFinite() || !y_.allFinite()) throw InputError("dataset: non-finite value");
  if (!column_names_.empty() && column_names_.size() != static_cast<std::size_t>(x_.cols()) + 1) {
    throw InputError("dataset: column_names must list d features plus the target");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd xs(static_cast<Eigen::Index>(rows.size()), x_.cols());
  Eigen::VectorXd ys(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) throw InputError("dataset: subset row out of range");
    xs.row(static_cast<Eigen::Index>(r)) = x_.row(static_cast<Eigen::Index>(rows[r]));
    ys(static_cast<Eigen::Index>(r)) = y_(static_cast<Eigen::Index>(rows[r]));
  }
  return Dataset(std::move(xs), std::move(ys), column_names_);
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.x_.rows() == b.x_.rows() && a.x_.cols() == b.x_.cols() && a.x_ == b.x_ && a.y_ == b.y_ &&
         a.column_names_ == b.column_names_;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw InputError("csv: non-numeric cell '" + cell + "' at row " + std::to_string(row) + ", column " +
                     std::to_string(col));
  }
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table parse_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Table t;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw InputError("csv: row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(t.header.size()));
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) values[c] = parse_cell(cells[c], line_no, c + 1);
    t.rows.push_back(std::move(values));
  }
  if (!have_header) throw InputError("csv: empty file");
  if (t.rows.empty()) throw InputError("csv: no data rows");
  return t;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf, ptr);
}

Dataset parse_csv(const std::string& text, const std::string& target_column) {
  Table t = parse_table(text);
  const std::size_t cols = t.header.size();
  if (cols < 2) throw InputError("csv: at least 2 columns required (features and target)");

  std::size_t target = cols - 1;
  if (!target_column.empty()) {
    target = cols;
    for (std::size_t c = 0; c < cols; ++c) {
      if (t.header[c] == target_column) {
        target = c;
        break;
      }
    }
    if (target == cols) throw InputError("csv: target column '" + target_column + "' not found");
  }

  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto d = static_cast<Eigen::Index>(cols - 1);
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  std::vector<std::string> names;
  for (std::size_t c = 0; c < cols; ++c)
    if (c != target) names.push_back(t.header[c]);
  names.push_back(t.header[target]);

  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = t.rows[static_cast<std::size_t>(r)];
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (c == target) {
        y(r) = row[c];
      } else {
        x(r, j++) = row[c];
      }
    }
  }
  return Dataset(std::move(x), std::move(y), std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column) {
  return parse_csv(read_file(path), target_column);
}

std::string format_csv(const Dataset& data) {
  std::string out;
  const std::size_t d = data.dim();
  std::vector<std::string> names = data.column_names();
  if (names.empty()) {
    for (std::size_t j = 0; j < d; ++j) names.push_back("x" + std::to_string(j + 1));
    names.push_back("y");
  }
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out += ',';
    out += names[c];
  }
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out += format_real(data.x()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out += ',';
    }
    out += format_real(data.target(i));
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path.string());
  out << format_csv(data);
  if (!out) throw InputError("write failed: " + path.string());
}

Eigen::MatrixXd load_feature_csv(const std::filesystem::path& path, std::vector<std::string>* header) {
  Table t = parse_table(read_file(path));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.header.size(); ++c)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.rows[r][c];
  if (header) *header = t.header;
  return x;
}

}  // namespace calr
