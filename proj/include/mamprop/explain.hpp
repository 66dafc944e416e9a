#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mamprop/evaluation.hpp"
#include "mamprop/features.hpp"
#include "mamprop/learners.hpp"

namespace mamprop {

struct ShapExplanation {
  double base_value = 0.0;
  Eigen::VectorXd phis;
  double prediction = 0.0;
  Eigen::VectorXd feature_values;  ///< what the instance looked like (set by the caller)
  std::uint64_t schema_fingerprint = 0;
};

/// Interventional SHAP for tree ensembles: exact Shapley values of
/// v(S) = mean_b f(x_S, b_notS), computed per (instance, background row) by walking the
/// splits where x and b disagree. Throws ValidationError for non-tree models or an empty
/// background, SchemaError for width mismatches.
ShapExplanation tree_shap(const TrainedModel& m, const Eigen::VectorXd& x,
                          const Eigen::MatrixXd& background);

/// Brute force over all 2^M coalitions with the same value function; any model.
ShapExplanation exact_shap_oracle(const TrainedModel& m, const Eigen::VectorXd& x,
                                  const Eigen::MatrixXd& background, std::size_t max_features = 15);

/// Up to n rows drawn without replacement (all rows when fewer), in row order.
std::vector<std::size_t> sample_background(std::size_t rows, std::size_t n, std::uint64_t seed);

/// Sums phis (and reports the active level index as the value) within each one-hot group.
struct GroupedExplanations {
  std::vector<std::string> names;
  std::vector<ShapExplanation> explanations;
};
GroupedExplanations aggregate_groups(const std::vector<ShapExplanation>& ex, const FeatureSchema& schema);

enum class ImportanceKind { drop_column, gain, mean_abs_shap };
std::string_view to_string(ImportanceKind k);

struct ImportanceReport {
  ImportanceKind kind = ImportanceKind::gain;
  std::vector<std::string> names;
  std::vector<double> scores;
  std::optional<double> baseline_score;  ///< drop_column only
  std::vector<double> ablated_scores;    ///< drop_column only
  std::vector<std::uint64_t> fold_hashes;  ///< drop_column: one per evaluation

  nlohmann::json to_json() const;
  /// Sorted by descending score.
  std::string to_csv() const;
};

/// importance(group) = mean CV R^2 with all features - mean CV R^2 without the group,
/// every evaluation on the same folds and seeds.
ImportanceReport drop_column_importance(const LearnerConfig& cfg, const FeatureMatrix& x,
                                        const Eigen::VectorXd& y, std::size_t k,
                                        std::uint64_t seed, bool standardize_onehot = false);
ImportanceReport drop_column_importance(const LearnerConfig& cfg, const Dataset& ds,
                                        const FeaturizationPlan& plan, LabelKind label,
                                        std::size_t k, std::uint64_t seed,
                                        const ElementTable* elements = nullptr);

/// Total split gain per feature. Throws ValidationError for models without trees.
ImportanceReport gain_importance(const TrainedModel& m, const std::vector<std::string>& names);

ImportanceReport mean_abs_shap(const std::vector<ShapExplanation>& ex,
                               const std::vector<std::string>& names);

/// Writes summary.csv, summary_swarm.csv, waterfall.csv, force.csv, decision.csv,
/// dependence.csv and shap.json into `dir`. Throws ValidationError for an empty list or
/// explanations with differing schemas.
void write_shap_exports(const std::vector<ShapExplanation>& ex, const std::vector<std::string>& names,
                        const std::filesystem::path& dir, const nlohmann::json& provenance);

/// Building blocks of the exports (also used by tests).
struct WaterfallRow {
  std::string feature;
  double value = 0.0;
  double phi = 0.0;
  double start = 0.0;
  double end = 0.0;
};
std::vector<WaterfallRow> waterfall(const ShapExplanation& e, const std::vector<std::string>& names);
/// Feature whose values correlate most strongly (|Pearson|) with the target's phis.
std::optional<std::size_t> interaction_partner(const std::vector<ShapExplanation>& ex, std::size_t target);

}  // namespace mamprop
