#pragma once

#include "calr/calf.hpp"
#include "calr/dataset.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace calr {

inline constexpr int kMipSchemaVersion = 1;

enum class VarKind { continuous, binary };

struct MipVariable {
  std::string name;  // e.g. "alpha[1][0][2]"
  VarKind kind = VarKind::continuous;
  friend bool operator==(const MipVariable&, const MipVariable&) = default;
};

// coef * product of the listed variables (a variable may repeat).
struct MipTerm {
  double coef = 0.0;
  std::vector<std::size_t> vars;
  friend bool operator==(const MipTerm&, const MipTerm&) = default;
};

struct MipExpression {
  std::vector<MipTerm> terms;
  double constant = 0.0;
  friend bool operator==(const MipExpression&, const MipExpression&) = default;
};

enum class Sense { eq, le };

struct MipConstraint {
  std::string family;  // binary | disjoint | product | halfspace
  std::vector<std::size_t> index;
  MipExpression lhs;
  Sense sense = Sense::le;
  double rhs = 0.0;
  friend bool operator==(const MipConstraint&, const MipConstraint&) = default;
};

// Indexing: rows i = 0..n-1, functions j = 0..M (0 is the default), local
// areas j = 1..M, half-spaces k = 0..K-1, coefficients l = 0..d (0 is the
// intercept). Variable blocks, in id order:
//   beta[j][l]        continuous, (M+1)(d+1)
//   alpha[j][k][l-1]  continuous, M K d
//   gamma[j][k]       continuous, M K
//   I[i][j][k]        binary,     n M K
//   Iarea[i][j]       binary,     n M
// Objective: minimize the sum over rows of residual_i^2 with
//   residual_i = beta_0 . (1, x_i) + sum_j Iarea[i][j] beta_j . (1, x_i) - y_i.
struct MipInstance {
  std::size_t n = 0, d = 0, m = 0, k = 0;
  double tau = 0.0;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<MipVariable> variables;
  std::vector<MipExpression> residuals;
  std::vector<MipConstraint> constraints;

  std::size_t beta_id(std::size_t j, std::size_t l) const;
  std::size_t alpha_id(std::size_t j, std::size_t kk, std::size_t l) const;  // l = 0..d-1
  std::size_t gamma_id(std::size_t j, std::size_t kk) const;
  std::size_t indicator_id(std::size_t i, std::size_t j, std::size_t kk) const;
  std::size_t area_indicator_id(std::size_t i, std::size_t j) const;

  friend bool operator==(const MipInstance& a, const MipInstance& b);
};

// (d+1)(K+1)M: the beta, alpha and gamma variables of the M local models.
std::size_t mip_local_model_variables(std::size_t d, std::size_t m, std::size_t k);
// n(M(2K+1)+1)
std::size_t mip_constraint_count(std::size_t n, std::size_t m, std::size_t k);

// -1e-6 * max(1, max |x|)
double default_mip_tau(const Dataset& data);

// Throws InputError unless M >= 1, K >= 1 and tau < 0.
MipInstance build_mip(const Dataset& data, std::size_t m, std::size_t k, std::optional<double> tau = std::nullopt);

nlohmann::ordered_json mip_to_json(const MipInstance& instance);
MipInstance mip_from_json(const nlohmann::json& doc);
std::string dump_mip(const MipInstance& instance);
void export_mip(const MipInstance& instance, const std::filesystem::path& path);
MipInstance import_mip(const std::filesystem::path& path);

double evaluate(const MipExpression& expr, const std::vector<double>& values);
double mip_objective(const MipInstance& instance, const std::vector<double>& values);
// Largest violation over all constraints (0 when every one holds).
double mip_max_violation(const MipInstance& instance, const std::vector<double>& values);

// Variable values realizing `model`: local coefficients are stored relative
// to the default (the objective adds them to it), areas with fewer than K
// half-spaces repeat their last one, unused areas become {x : 1 <= 0}, and
// indicators follow half-space membership.
std::vector<double> mip_witness(const MipInstance& instance, const CalfModel& model);

}  // namespace calr
