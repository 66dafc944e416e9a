#include <algorithm>
#include <numeric>

#include "mamprop/csv.hpp"
#include "mamprop/error.hpp"
#include "mamprop/explain.hpp"
#include "mamprop/io.hpp"

namespace mamprop {

std::string_view to_string(ImportanceKind k) {
  switch (k) {
    case ImportanceKind::drop_column: return "drop_column";
    case ImportanceKind::gain: return "gain";
    case ImportanceKind::mean_abs_shap: return "mean_abs_shap";
  }
  return "gain";
}

ImportanceReport drop_column_importance(const LearnerConfig& cfg, const FeatureMatrix& x,
                                        const Eigen::VectorXd& y, std::size_t k,
                                        std::uint64_t seed, bool standardize_onehot) {
  const auto groups = x.schema.groups();
  if (groups.size() < 2) throw ValidationError("drop-column importance needs at least 2 feature groups");
  const auto folds = kfold_indices(static_cast<std::size_t>(x.rows()), k, seed);

  ImportanceReport rep;
  rep.kind = ImportanceKind::drop_column;
  const CvReport base = cross_validate_matrix(cfg, x, y, folds, seed, standardize_onehot);
  rep.baseline_score = base.mean_r2;
  rep.fold_hashes.push_back(base.folds_hash);
  for (const auto& g : groups) {
    const FeatureMatrix reduced = x.select_columns(x.schema.kept_columns({g.name}));
    const CvReport r = cross_validate_matrix(cfg, reduced, y, folds, seed, standardize_onehot);
    rep.names.push_back(g.name);
    rep.ablated_scores.push_back(r.mean_r2);
    rep.scores.push_back(base.mean_r2 - r.mean_r2);
    rep.fold_hashes.push_back(r.folds_hash);
  }
  return rep;
}

ImportanceReport drop_column_importance(const LearnerConfig& cfg, const Dataset& ds,
                                        const FeaturizationPlan& plan, LabelKind label,
                                        std::size_t k, std::uint64_t seed,
                                        const ElementTable* elements) {
  const Dataset sel = select_complete(ds, required_fields(plan), label);
  const FeatureMatrix x = featurize(sel, plan, elements);
  return drop_column_importance(cfg, x, label_vector(sel, label), k, seed, plan.standardize_onehot);
}

ImportanceReport gain_importance(const TrainedModel& m, const std::vector<std::string>& names) {
  const auto view = tree_ensemble(m);
  if (!view) throw ValidationError("gain importance needs a tree-based model");
  if (names.size() != m.n_features) throw SchemaError("feature names do not match the model");
  ImportanceReport rep;
  rep.kind = ImportanceKind::gain;
  rep.names = names;
  rep.scores.assign(names.size(), 0.0);
  for (const Tree* t : view->trees) {
    for (const auto& n : t->nodes) {
      if (!n.is_leaf()) rep.scores[static_cast<std::size_t>(n.feature)] += n.gain;
    }
  }
  return rep;
}

ImportanceReport mean_abs_shap(const std::vector<ShapExplanation>& ex,
                               const std::vector<std::string>& names) {
  if (ex.empty()) throw ValidationError("no explanations to summarize");
  ImportanceReport rep;
  rep.kind = ImportanceKind::mean_abs_shap;
  rep.names = names;
  rep.scores.assign(names.size(), 0.0);
  for (const auto& e : ex) {
    if (static_cast<std::size_t>(e.phis.size()) != names.size()) {
      throw SchemaError("explanation width does not match the feature names");
    }
    for (std::size_t j = 0; j < names.size(); ++j) rep.scores[j] += std::abs(e.phis(static_cast<Eigen::Index>(j)));
  }
  for (auto& s : rep.scores) s /= static_cast<double>(ex.size());
  return rep;
}

nlohmann::json ImportanceReport::to_json() const {
  nlohmann::json items = nlohmann::json::array();
  for (std::size_t i = 0; i < names.size(); ++i) {
    nlohmann::json j{{"feature", names[i]}, {"score", scores[i]}};
    if (!ablated_scores.empty()) j["ablated_r2"] = ablated_scores[i];
    items.push_back(j);
  }
  nlohmann::json out{{"kind", to_string(kind)}, {"features", items}};
  if (baseline_score) out["baseline_r2"] = *baseline_score;
  if (!fold_hashes.empty()) {
    std::vector<std::string> h;
    for (auto v : fold_hashes) h.push_back(hex64(v));
    out["fold_hashes"] = h;
  }
  return out;
}

std::string ImportanceReport::to_csv() const {
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::string out = csv_line({"feature", "score"});
  for (std::size_t i : order) out += csv_line({names[i], format_number(scores[i])});
  return out;
}

}  // namespace mamprop
