#include "calr/calf.hpp"

#include "calr/error.hpp"

#include <cmath>
#include <string>

namespace calr {

LinearModel make_linear(Eigen::VectorXd coeffs) {
  LinearModel m;
  m.coeffs = std::move(coeffs);
  return m;
}

void CalfModel::validate() const {
  if (d < 1) throw InputError("model: dimension must be at least 1");
  const auto want = static_cast<Eigen::Index>(d + 1);
  if (default_model.coeffs.size() != want) throw InputError("model: default coefficients have wrong dimension");
  if (!default_model.coeffs.allFinite()) throw InputError("model: non-finite default coefficients");
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const auto& piece = pieces[p];
    if (piece.model.coeffs.size() != want) {
      throw InputError("model: piece " + std::to_string(p + 1) + " coefficients have dimension " +
                       std::to_string(piece.model.coeffs.size() - 1) + ", expected " + std::to_string(d));
    }
    if (!piece.model.coeffs.allFinite()) throw InputError("model: non-finite piece coefficients");
    for (const auto& h : piece.area.halfspaces) {
      if (h.alpha.size() != static_cast<Eigen::Index>(d)) {
        throw InputError("model: piece " + std::to_string(p + 1) + " half-space has dimension " +
                         std::to_string(h.alpha.size()) + ", expected " + std::to_string(d));
      }
      if (!h.alpha.allFinite() || !std::isfinite(h.gamma)) throw InputError("model: non-finite half-space");
      if (h.alpha.isZero(0.0)) throw InputError("model: half-space with a zero normal");
    }
  }
}

std::optional<std::size_t> CalfModel::locate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != static_cast<Eigen::Index>(d)) {
    throw InputError("predict: point has dimension " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(d));
  }
  for (std::size_t p = 0; p < pieces.size(); ++p)
    if (pieces[p].area.contains(x)) return p;
  return std::nullopt;
}

bool operator==(const CalfModel& a, const CalfModel& b) {
  if (a.d != b.d || a.pieces.size() != b.pieces.size()) return false;
  if (a.default_model.coeffs != b.default_model.coeffs) return false;
  for (std::size_t p = 0; p < a.pieces.size(); ++p) {
    if (a.pieces[p].model.coeffs.size() != b.pieces[p].model.coeffs.size() ||
        a.pieces[p].model.coeffs != b.pieces[p].model.coeffs || !(a.pieces[p].area == b.pieces[p].area)) {
      return false;
    }
  }
  return true;
}

double predict(const CalfModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto piece = model.locate(x);
  return predict_linear(piece ? model.pieces[*piece].model : model.default_model, x);
}

Eigen::VectorXd predict_all(const CalfModel& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict(model, x.row(i).transpose());
  return out;
}

double total_squared_error(const CalfModel& model, const Dataset& data) {
  if (data.dim() != model.d) throw InputError("mse: dataset dimension does not match model");
  return (data.y() - predict_all(model, data.x())).squaredNorm();
}

double mse(const CalfModel& model, const Dataset& data) {
  return total_squared_error(model, data) / static_cast<double>(data.size());
}

bool decide_calr(const Dataset& data, const CalfModel& model, double bound) { return mse(model, data) < bound; }

std::vector<std::size_t> assign_regions(const CalfModel& model, const Eigen::MatrixXd& x) {
  std::vector<std::size_t> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto p = model.locate(x.row(i).transpose());
    out[static_cast<std::size_t>(i)] = p ? *p + 1 : 0;
  }
  return out;
}

}  // namespace calr
