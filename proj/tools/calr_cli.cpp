// calr: command-line front end.
//
// Exit codes: 0 success, 1 input or usage error, 2 the data or parameters
// defeated the algorithm (not separable, sampling budget exhausted).

#include <algorithm>
#include "calr/calf.hpp"
#include "calr/dataset.hpp"
#include "calr/error.hpp"
#include "calr/fit.hpp"
#include "calr/generator.hpp"
#include "calr/mip.hpp"
#include "calr/model_io.hpp"
#include "calr/pldc.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using calr::format_real;

struct FitArgs {
  std::string data, target, out, report;
  std::string algo = "cas";
  std::size_t m = 1;
  double tau = calr::kDefaultTau;
  std::string epsilon = "auto";
  double delta = calr::kDefaultDelta;
  std::uint64_t seed = 0;
  std::size_t max_samples = 0;
  std::string separator = "lp";
  std::size_t max_n = 16;
  bool force = false;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    calr::write_text(path, text);
  }
}

std::string describe(const calr::LinearModel& f) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < f.coeffs.size(); ++i) s += (i ? " " : "") + format_real(f.coeffs(i));
  return s + "]";
}

std::string fit_report(const calr::CalfModel& model, const calr::FitDiagnostics& diag, const calr::Dataset& data,
                       const std::string& status) {
  std::ostringstream r;
  r << "algorithm: " << diag.algorithm << "\n";
  r << "status: " << status << "\n";
  r << "mse: " << format_real(calr::mse(model, data)) << "\n";
  r << "pieces: " << model.pieces.size() << "\n";
  const auto routed = calr::assign_regions(model, data.x());
  std::vector<std::size_t> counts(model.pieces.size() + 1, 0);
  for (auto a : routed) ++counts[a];
  for (std::size_t p = 0; p < model.pieces.size(); ++p) {
    r << "piece " << p + 1 << ": points=" << counts[p + 1] << " p_value=" << format_real(model.pieces[p].model.p_value)
      << " coeffs=" << describe(model.pieces[p].model) << " halfspaces=" << model.pieces[p].area.halfspaces.size()
      << "\n";
  }
  r << "default: points=" << counts[0] << " p_value=" << format_real(model.default_model.p_value)
    << " coeffs=" << describe(model.default_model) << "\n";
  r << "samples: " << diag.samples << " (degenerate " << diag.degenerate << ")\n";
  r << "epsilon: " << format_real(diag.epsilon) << "\n";
  if (!diag.branch.empty()) r << "branch: " << diag.branch << "\n";
  if (diag.post_pieces) r << "post pieces: " << diag.post_pieces << "\n";
  return r.str();
}

int run_fit(const FitArgs& a) {
  const auto data = calr::load_csv(a.data, a.target);
  if (a.algo == "naive") {
    const auto model = calr::naive_calr(data, calr::NaiveOptions{a.max_n, a.force});
    calr::FitDiagnostics diag;
    diag.algorithm = "naive";
    calr::save_model(model, a.out);
    emit(fit_report(model, diag, data, "ok"), a.report);
    return 0;
  }
  if (a.algo != "cas" && a.algo != "cas2") throw calr::InputError("fit: --algo must be cas, cas2 or naive");
  if (a.algo == "cas2" && a.m != 1) throw calr::InputError("fit: cas2 requires --m 1");

  calr::FitConfig cfg;
  cfg.m = a.m;
  cfg.tau = a.tau;
  cfg.delta = a.delta;
  cfg.seed = a.seed;
  cfg.separator = calr::parse_separator(a.separator);
  if (a.max_samples) cfg.max_samples = a.max_samples;
  if (a.epsilon != "auto") {
    try {
      std::size_t used = 0;
      cfg.epsilon = std::stod(a.epsilon, &used);
      if (used != a.epsilon.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw calr::InputError("fit: --epsilon must be 'auto' or a positive number");
    }
  }

  try {
    const auto result = a.algo == "cas" ? calr::cas_calr(data, cfg) : calr::cas2(data, cfg);
    calr::save_model(result.model, a.out);
    emit(fit_report(result.model, result.diagnostics, data, "ok"), a.report);
    return 0;
  } catch (const calr::BudgetExhausted& e) {
    // Partial model: the first accepted function, or the global fit.
    const auto& diag = e.partial();
    calr::CalfModel partial;
    partial.d = data.dim();
    partial.default_model = diag.functions.empty() ? calr::lr(data) : diag.functions.front();
    calr::save_model(partial, a.out);
    std::string text = fit_report(partial, diag, data, "budget-exhausted");
    text += "partial: default-only model from " + std::to_string(diag.functions.size()) + " of " +
            std::to_string(cfg.m + 1) + " functions\n";
    emit(text, a.report);
    std::cerr << "calr: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex-area-wise linear regression"};
  app.require_subcommand(1);

  calr::GeneratorConfig gen;
  std::string gen_out, gen_truth;
  auto* g = app.add_subcommand("gen", "Generate convex-area separable data with a planted model");
  g->add_option("--n", gen.n, "Rows")->required();
  g->add_option("--d", gen.d, "Feature dimension")->required();
  g->add_option("--m", gen.m, "Planted areas")->required();
  g->add_option("--sigma", gen.sigma, "Noise standard deviation")->default_val(0.0);
  g->add_option("--delta", gen.delta, "Minimum coefficient distance")->default_val(calr::kDefaultDelta);
  g->add_option("--seed", gen.seed, "Random seed")->default_val(0);
  g->add_option("--out", gen_out, "Data CSV")->required();
  g->add_option("--truth", gen_truth, "Ground-truth JSON");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit a convex-area-wise linear model");
  f->add_option("--data", fit.data, "Training CSV")->required();
  f->add_option("--target", fit.target, "Target column (default: last)");
  f->add_option("--algo", fit.algo, "cas | cas2 | naive")->default_val("cas");
  f->add_option("--m", fit.m, "Number of local areas")->default_val(1);
  f->add_option("--tau", fit.tau, "F-test threshold")->default_val(calr::kDefaultTau);
  f->add_option("--epsilon", fit.epsilon, "Fit tolerance or 'auto'")->default_val("auto");
  f->add_option("--delta", fit.delta, "Minimum distance between functions")->default_val(calr::kDefaultDelta);
  f->add_option("--seed", fit.seed, "Random seed")->default_val(0);
  f->add_option("--max-samples", fit.max_samples, "Sampling budget (0 = default)")->default_val(0);
  f->add_option("--separator", fit.separator, "lp | svm")->default_val("lp");
  f->add_option("--max-n", fit.max_n, "Row cap for naive")->default_val(16);
  f->add_flag("--force", fit.force, "Lift the naive row cap");
  f->add_option("--out", fit.out, "Model JSON")->required();
  f->add_option("--report", fit.report, "Report file (default: stdout)");

  FitArgs naive;
  naive.algo = "naive";
  auto* nf = app.add_subcommand("naive-fit", "Exhaustive one-area fit (small data only)");
  nf->add_option("--data", naive.data, "Training CSV")->required();
  nf->add_option("--target", naive.target, "Target column (default: last)");
  nf->add_option("--max-n", naive.max_n, "Row cap")->default_val(16);
  nf->add_flag("--force", naive.force, "Lift the row cap");
  nf->add_option("--out", naive.out, "Model JSON")->required();
  nf->add_option("--report", naive.report, "Report file (default: stdout)");

  std::string pred_model, pred_data, pred_out, pred_skip;
  auto* p = app.add_subcommand("predict", "Append predictions to a feature CSV");
  p->add_option("--model", pred_model, "Model JSON")->required();
  p->add_option("--data", pred_data, "Feature CSV (exactly d columns)")->required();
  p->add_option("--target", pred_skip, "Column to leave out of the features (kept in the output)");
  p->add_option("--out", pred_out, "Output CSV (default: stdout)");

  std::string ev_model, ev_data, ev_target;
  std::optional<double> ev_bound;
  auto* e = app.add_subcommand("eval", "Mean squared error of a model on data");
  e->add_option("--model", ev_model, "Model JSON")->required();
  e->add_option("--data", ev_data, "CSV with target")->required();
  e->add_option("--target", ev_target, "Target column (default: last)");
  e->add_option("--bound", ev_bound, "Print PASS when mse < bound, else FAIL");

  std::string mip_data, mip_target, mip_out;
  std::size_t mip_m = 1, mip_k = 1;
  std::optional<double> mip_tau;
  auto* x = app.add_subcommand("export-mip", "Write the mixed-integer program for a dataset");
  x->add_option("--data", mip_data, "CSV with target")->required();
  x->add_option("--target", mip_target, "Target column (default: last)");
  x->add_option("--m", mip_m, "Local areas")->required();
  x->add_option("--k", mip_k, "Half-spaces per area")->required();
  x->add_option("--tau", mip_tau, "Activation margin (negative)");
  x->add_option("--out", mip_out, "Output JSON")->required();

  std::string pl_spec, pl_out;
  auto* c = app.add_subcommand("pldc-convert", "Convert a difference of max-affine functions to a model");
  c->add_option("--spec", pl_spec, "PLDC JSON")->required();
  c->add_option("--out", pl_out, "Model JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return 1;
  }

  try {
    if (g->parsed()) {
      const auto [data, truth] = calr::generate_separable(gen);
      calr::write_csv(data, gen_out);
      if (!gen_truth.empty()) calr::save_truth(truth, gen_truth);
      return 0;
    }
    if (f->parsed()) return run_fit(fit);
    if (nf->parsed()) return run_fit(naive);
    if (p->parsed()) {
      const auto model = calr::load_model(pred_model);
      std::vector<std::string> header;
      const auto xs = calr::load_feature_csv(pred_data, &header);
      Eigen::MatrixXd features = xs;
      if (!pred_skip.empty()) {
        const auto it = std::find(header.begin(), header.end(), pred_skip);
        if (it == header.end()) throw calr::InputError("predict: no column named '" + pred_skip + "'");
        const auto skip = static_cast<Eigen::Index>(it - header.begin());
        features.resize(xs.rows(), xs.cols() - 1);
        for (Eigen::Index j = 0, k = 0; j < xs.cols(); ++j)
          if (j != skip) features.col(k++) = xs.col(j);
      }
      if (static_cast<std::size_t>(features.cols()) != model.d) {
        throw calr::InputError("predict: data has " + std::to_string(features.cols()) +
                               " feature columns, model expects " + std::to_string(model.d));
      }
      const auto yhat = calr::predict_all(model, features);
      std::string out;
      for (const auto& h : header) out += h + ",";
      out += "prediction\n";
      for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        for (Eigen::Index j = 0; j < xs.cols(); ++j) out += format_real(xs(i, j)) + ",";
        out += format_real(yhat(i)) + "\n";
      }
      emit(out, pred_out);
      return 0;
    }
    if (e->parsed()) {
      const auto model = calr::load_model(ev_model);
      const auto data = calr::load_csv(ev_data, ev_target);
      if (data.dim() != model.d) {
        throw calr::InputError("eval: data has dimension " + std::to_string(data.dim()) + ", model expects " +
                               std::to_string(model.d));
      }
      const double err = calr::mse(model, data);
      std::cout << "mse: " << format_real(err) << "\n";
      if (ev_bound) std::cout << (calr::decide_calr(data, model, *ev_bound) ? "PASS" : "FAIL") << "\n";
      return 0;
    }
    if (x->parsed()) {
      const auto data = calr::load_csv(mip_data, mip_target);
      calr::export_mip(calr::build_mip(data, mip_m, mip_k, mip_tau), mip_out);
      return 0;
    }
    if (c->parsed()) {
      const auto spec = calr::pldc_from_json(nlohmann::json::parse(calr::read_text(pl_spec)));
      emit(calr::dump_model(calr::pldc_to_calf(spec)), pl_out);
      return 0;
    }
  } catch (const calr::InputError& ex) {
    std::cerr << "calr: " << ex.what() << "\n";
    return 1;
  } catch (const calr::DiagnosticError& ex) {
    std::cerr << "calr: " << ex.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& ex) {
    std::cerr << "calr: malformed JSON: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
