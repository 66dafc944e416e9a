#include <cmath>

#include "internal.hpp"
#include "mamprop/error.hpp"
#include "mamprop/io.hpp"

namespace mamprop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

TrainedModel fit(const LearnerConfig& cfg, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  validate_config(cfg);
  if (x.rows() < 2) throw ValidationError("need at least 2 training rows");
  if (y.size() != x.rows()) throw ValidationError("label count does not match feature rows");
  if (!x.allFinite()) throw ValidationError("feature matrix contains non-finite values");
  if (!y.allFinite()) throw ValidationError("labels contain non-finite values");

  TrainedModel m;
  m.config = cfg;
  m.n_features = static_cast<std::size_t>(x.cols());
  bool converged = true;
  m.params = std::visit(
      overloaded{
          [&](const MeanConfig&) -> ModelParams { return MeanParams{y.mean()}; },
          [&](const RidgeConfig& c) -> ModelParams { return detail::fit_ridge(c, x, y); },
          [&](const LassoConfig& c) -> ModelParams { return detail::fit_lasso(c, x, y, converged); },
          [&](const TreeConfig& c) -> ModelParams { return detail::fit_tree(c, x, y); },
          [&](const ForestConfig& c) -> ModelParams { return detail::fit_forest(c, x, y); },
          [&](const BoostingConfig& c) -> ModelParams { return detail::fit_boosting(c, x, y); },
          [&](const GprConfig& c) -> ModelParams { return detail::fit_gpr(c, x, y); },
          [&](const MlpConfig& c) -> ModelParams { return detail::fit_mlp(c, x, y); },
          [&](const SvrConfig& c) -> ModelParams { return detail::fit_svr(c, x, y, converged); },
      },
      cfg);
  m.converged = converged;
  return m;
}

TrainedModel fit(const LearnerConfig& cfg, const FeatureMatrix& x, const Eigen::VectorXd& y) {
  TrainedModel m = fit(cfg, x.values, y);
  m.schema_fingerprint = x.schema.fingerprint();
  return m;
}

Eigen::VectorXd predict_matrix(const TrainedModel& m, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != m.n_features) {
    throw SchemaError("model expects " + std::to_string(m.n_features) + " features, got " +
                      std::to_string(x.cols()));
  }
  return std::visit(
      overloaded{
          [&](const MeanParams& p) -> Eigen::VectorXd {
            return Eigen::VectorXd::Constant(x.rows(), p.value);
          },
          [&](const LinearParams& p) -> Eigen::VectorXd {
            return (x * p.weights).array() + p.intercept;
          },
          [&](const TreeParams& p) -> Eigen::VectorXd {
            Eigen::VectorXd out(x.rows());
            for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = p.tree.predict(x.row(i));
            return out;
          },
          [&](const ForestParams& p) -> Eigen::VectorXd { return detail::predict_forest(p, x); },
          [&](const BoostingParams& p) -> Eigen::VectorXd { return detail::predict_boosting(p, x); },
          [&](const GprParams&) -> Eigen::VectorXd { return gpr_predict(m, x).first; },
          [&](const MlpParams& p) -> Eigen::VectorXd {
            return (mlp_forward(p, x).array() * p.y_scale + p.y_mean).matrix();
          },
          [&](const SvrParams& p) -> Eigen::VectorXd { return detail::predict_svr(p, x); },
      },
      m.params);
}

Eigen::VectorXd predict(const TrainedModel& m, const FeatureMatrix& x) {
  if (x.schema.fingerprint() != m.schema_fingerprint) {
    throw SchemaError("feature schema " + hex64(x.schema.fingerprint()) +
                      " does not match the model's schema " + hex64(m.schema_fingerprint));
  }
  return predict_matrix(m, x.values);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gpr_predict(const TrainedModel& m,
                                                        const Eigen::MatrixXd& x) {
  const auto* p = std::get_if<GprParams>(&m.params);
  const auto* c = std::get_if<GprConfig>(&m.config);
  if (!p || !c) throw ValidationError("model is not a Gaussian process");
  const Eigen::MatrixXd ks = detail::gpr_kernel(*c, x, p->x_train);
  Eigen::VectorXd mean = ((ks * p->alpha).array() * p->y_scale + p->y_mean).matrix();
  const Eigen::MatrixXd v = p->chol.triangularView<Eigen::Lower>().solve(ks.transpose());
  Eigen::VectorXd var(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double latent = c->signal_var - v.col(i).squaredNorm();
    var(i) = std::max(0.0, latent) * p->y_scale * p->y_scale;
  }
  return {mean, var};
}

std::optional<TreeEnsembleView> tree_ensemble(const TrainedModel& m) {
  TreeEnsembleView view;
  if (const auto* p = std::get_if<TreeParams>(&m.params)) {
    view.trees.push_back(&p->tree);
    return view;
  }
  if (const auto* p = std::get_if<ForestParams>(&m.params)) {
    for (const auto& t : p->trees) view.trees.push_back(&t);
    view.scale = p->trees.empty() ? 1.0 : 1.0 / static_cast<double>(p->trees.size());
    return view;
  }
  if (const auto* p = std::get_if<BoostingParams>(&m.params)) {
    view.base = p->base;
    for (const auto& t : p->trees) view.trees.push_back(&t);
    return view;
  }
  return std::nullopt;
}

}  // namespace mamprop
