#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mamprop/features.hpp"
#include "mamprop/learners.hpp"

namespace mamprop {

/// 1 - SSE/SST. Throws ValidationError on length mismatch, fewer than 2 values or
/// constant y.
double r2(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat);
double mae(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat);
/// Population standard deviation of the values.
double population_std(const std::vector<double>& v);
double mean_of(const std::vector<double>& v);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Shuffles 0..n-1 once with `seed` and cuts it into k contiguous folds; the first
/// n % k folds get one extra index. Index lists are sorted within each fold.
std::vector<Fold> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed);
std::uint64_t fold_hash(const std::vector<Fold>& folds);

/// Train/test matrices of one fold with a standardizer fit on the training rows only.
struct FoldData {
  FeatureMatrix train;
  FeatureMatrix test;
  Standardizer standardizer;
};
FoldData prepare_fold(const FeatureMatrix& x, const Fold& fold, bool standardize_onehot);

struct CvReport {
  std::string task;
  std::string featurization;
  LearnerConfig config;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::size_t n_records = 0;
  std::size_t n_features = 0;
  std::uint64_t folds_hash = 0;
  std::vector<double> fold_r2;
  std::vector<double> fold_mae;
  double mean_r2 = 0.0;
  double std_r2 = 0.0;
  double mean_mae = 0.0;
  double std_mae = 0.0;
  bool converged = true;  ///< every fold's learner converged
  std::vector<double> oof_prediction;  ///< out-of-fold prediction per record
  std::vector<double> truth;

  nlohmann::json to_json() const;
  /// One row per fold plus mean and std rows.
  std::string folds_csv() const;
  /// record index, truth, out-of-fold prediction.
  std::string predictions_csv() const;
};

/// Evaluates `cfg` on prebuilt features. Fold f trains with seed derive_seed(seed, {f}).
/// Learner errors are rethrown with the fold index in the message.
CvReport cross_validate_matrix(const LearnerConfig& cfg, const FeatureMatrix& x,
                               const Eigen::VectorXd& y, const std::vector<Fold>& folds,
                               std::uint64_t seed, bool standardize_onehot = false);

/// select_complete, featurize every remaining row, then k-fold evaluation.
CvReport cross_validate(const LearnerConfig& cfg, const Dataset& ds, const FeaturizationPlan& plan,
                        LabelKind label, std::size_t k, std::uint64_t seed,
                        const ElementTable* elements = nullptr);

/// Human-readable featurization tag ("baseline", "baseline+composition", ...).
std::string featurization_tag(const FeaturizationPlan& plan);

struct CurvePoint {
  double fraction = 1.0;
  std::size_t evaluations = 0;  ///< repeats * folds
  double mean_train_rows = 0.0;
  double mean_mae = 0.0;
  double std_mae = 0.0;
  double mean_r2 = 0.0;
  double std_r2 = 0.0;
};

struct LearningCurve {
  std::string task;
  std::vector<CurvePoint> points;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// For each fraction and repeat, every fold's training partition is cut to the leading
/// fraction of a per-(repeat, fold) permutation, so smaller subsets nest inside larger
/// ones. Repeat 0 uses the cross-validation folds of `seed`; statistics pool all
/// repeat x fold scores.
LearningCurve learning_curve(const LearnerConfig& cfg, const FeatureMatrix& x,
                             const Eigen::VectorXd& y, const std::vector<double>& fractions,
                             std::size_t repeats, std::size_t k, std::uint64_t seed,
                             bool standardize_onehot = false);

struct CorrelationMatrix {
  std::vector<LabelKind> labels;
  /// values[i][j] is absent when fewer than 2 joint observations exist or a column is
  /// constant on the joint rows.
  std::vector<std::vector<std::optional<double>>> values;
  std::vector<std::vector<std::size_t>> counts;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Pearson correlation on pairwise-complete observations.
CorrelationMatrix pearson_matrix(const Dataset& ds, const std::vector<LabelKind>& labels,
                                 const std::optional<std::string>& material = std::nullopt);
std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace mamprop
