#pragma once

#include "calr/fit.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace calr::detail {

// Smallest epsilon ever used: 1e-8 * (1 + max |y|).
double epsilon_floor(const Dataset& data);

// 3 * sigma-hat, where sigma-hat reads the noise scale off the
// ceil(|pool| / (2 groups))-th smallest absolute residual (the largest of
// `groups` groups holds at least |pool| / groups rows, so for a candidate
// drawn from it that order statistic is the median |noise|, 0.6745 sigma).
// The candidate is refit once on its consensus set |r| < 3 sigma-hat before
// the final reading.
double estimate_epsilon(const LinearModel& f, const Dataset& data, std::span<const std::size_t> pool,
                        std::size_t groups);

struct Draw {
  LinearModel f;
  std::vector<std::size_t> sample;
  double epsilon = 0.0;
};

// Random sampling with the acceptance gate shared by cas_calr and cas2: full
// rank, F-test p-value below tau, every sample residual below epsilon, at
// least delta away from the accepted functions, and the sample separable by a
// convex area from the pool rows the candidate does not fit. An accepted
// sample's function is refit on the pool rows it fits before it is returned.
class Sampler {
 public:
  Sampler(const Dataset& data, const FitConfig& config, FitDiagnostics& diagnostics);

  // nullopt when the budget runs out or the pool is smaller than a sample.
  std::optional<Draw> next(std::span<const std::size_t> pool, const std::vector<LinearModel>& accepted);

  std::optional<double> epsilon() const { return epsilon_; }

  // Auto epsilon: the smallest estimate over the gated samples among the
  // first 10 (M+1)^(k-1) draws, enough to expect about ten draws from a
  // single group. Mixed samples that slip through the F-test leave few rows
  // near their plane and give large estimates.
  std::size_t calibration_draws() const;
  std::size_t sample_size() const { return sample_size_; }
  std::size_t budget() const { return budget_; }

 private:
  const Dataset& data_;
  const FitConfig& config_;
  FitDiagnostics& diag_;
  Rng rng_;
  std::size_t sample_size_;
  std::size_t budget_;
  std::optional<double> epsilon_;

  std::optional<LinearModel> gated_draw(std::span<const std::size_t> pool, std::vector<std::size_t>& sample);
  bool calibrate(std::span<const std::size_t> pool);
  // Least-squares refit on the pool rows within eps, a few rounds.
  LinearModel refine(LinearModel f, std::span<const std::size_t> pool, double eps) const;
};

// Rows governed by each piece (index p) and by the default (index pieces.size()).
std::vector<std::vector<std::size_t>> route_rows(const CalfModel& model, const Dataset& data);

// Drops pieces that govern no training row, then cuts every pair of
// intersecting piece areas apart with a hyperplane that keeps each piece's
// governed rows. Training-row routing is unchanged.
void enforce_disjoint(CalfModel& model, const Dataset& data);

// Refits every piece and the default on the rows it governs that it fits
// within epsilon, and records governed-row counts.
void polish(CalfModel& model, const Dataset& data, double epsilon, FitDiagnostics& diagnostics);

std::vector<std::size_t> all_rows(std::size_t n);

}  // namespace calr::detail
