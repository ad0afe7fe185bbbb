#pragma once

#include "calr/calf.hpp"
#include "calr/error.hpp"
#include "calr/rng.hpp"
#include "calr/separation.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace calr {

inline constexpr double kDefaultDelta = 0.5;

struct FitConfig {
  std::size_t m = 1;
  double tau = kDefaultTau;
  std::optional<double> epsilon;  // nullopt = estimate from the data
  double delta = kDefaultDelta;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_samples;  // nullopt = default_sample_budget
  Separator separator = Separator::lp;
  // Rows per random sample; 0 picks d + 2, the smallest size that leaves the
  // F-test a residual degree of freedom.
  std::size_t sample_size = 0;

  // Throws InputError on out-of-range values.
  void validate() const;
};

// 200 (2M)^(d+1), clamped to [1000, 10^7].
std::size_t default_sample_budget(std::size_t m, std::size_t d);

struct FitDiagnostics {
  std::string algorithm;
  std::size_t samples = 0;     // draws consumed, degenerate ones included
  std::size_t degenerate = 0;  // draws skipped for a rank-deficient design
  double epsilon = 0.0;
  std::vector<LinearModel> functions;  // accepted functions, in order
  std::optional<std::size_t> default_index;  // position of f0 in `functions`
  std::size_t post_pieces = 0;
  std::string branch;  // cas2 only: "c1" or "c1-none"
  std::vector<std::size_t> piece_points;  // training rows governed by each piece
  std::size_t default_points = 0;
};

struct FitResult {
  CalfModel model;
  FitDiagnostics diagnostics;
};

// The sampling loop ran out of draws. Carries what was found so far.
class BudgetExhausted : public DiagnosticError {
 public:
  BudgetExhausted(const std::string& what, FitDiagnostics partial)
      : DiagnosticError(what), partial_(std::move(partial)) {}
  const FitDiagnostics& partial() const { return partial_; }

 private:
  FitDiagnostics partial_;
};

// |y - f(x)| < epsilon
bool fits(const LinearModel& f, const Dataset& data, std::size_t row, double epsilon);

// Rows fitted by exactly one function of F.
std::vector<std::size_t> distinct_rows(const std::vector<LinearModel>& functions, const Dataset& data, double epsilon);
Dataset distinct(const std::vector<LinearModel>& functions, const Dataset& data, double epsilon);

// Assigns the leftover rows (each fitted by at least two functions of
// `pieces`) to new pieces: for every ordered pair (f, g) the rows fitted by
// both are enclosed by an area that excludes every other row of `data` and
// handed to f. Throws DiagnosticError when such a set cannot be enclosed.
std::vector<Piece> post(const std::vector<Piece>& pieces, const Dataset& data, std::span<const std::size_t> leftovers,
                        double epsilon, Separator separator = Separator::lp);

// Convex-area sampling fit for M pieces plus a default function.
FitResult cas_calr(const Dataset& data, const FitConfig& config);

// Two-function variant (M = 1).
FitResult cas2(const Dataset& data, const FitConfig& config);

struct NaiveOptions {
  std::size_t max_n = 16;
  bool allow_large = false;
};

// Exhaustive search over every subset of size d+1 .. n-d-1 that a convex area
// can isolate; returns the one-piece model of least total squared error, or
// the global least-squares fit when no subset qualifies.
CalfModel naive_calr(const Dataset& data, const NaiveOptions& options = {});

// Number of uniform draws of `subset_size` distinct rows until one draw has a
// single label.
std::size_t draws_until_single_group(std::span<const std::size_t> labels, std::size_t subset_size, Rng& rng);

// Exact expectation of draws_until_single_group.
double expected_draws_until_single_group(std::span<const std::size_t> group_sizes, std::size_t subset_size);

}  // namespace calr
