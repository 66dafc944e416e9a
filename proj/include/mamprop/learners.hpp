#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mamprop/features.hpp"
#include "mamprop/tree.hpp"

namespace mamprop {

struct MeanConfig {};

struct RidgeConfig {
  double lambda = 1.0;
};

struct LassoConfig {
  double lambda = 0.1;
  int max_iter = 10000;
  double tol = 1e-7;
};

struct TreeConfig {
  std::optional<int> max_depth;
  int min_samples_leaf = 1;
};

struct ForestConfig {
  int n_estimators = 100;
  std::optional<int> max_depth;
  int min_samples_leaf = 1;
  std::optional<int> max_features;
  std::uint64_t seed = 0;
};

struct BoostingConfig {
  int n_estimators = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_samples_leaf = 1;
  double l1_leaf = 0.0;
  double l2_leaf = 0.0;
  double subsample = 1.0;
  std::uint64_t seed = 0;
};

struct GprConfig {
  double length_scale = 1.0;
  double signal_var = 1.0;
  double noise_var = 1e-2;
};

struct MlpConfig {
  std::vector<int> layer_sizes = {100};
  double alpha = 1e-4;
  double learning_rate = 1e-3;
  int epochs = 200;
  int batch_size = 32;
  std::uint64_t seed = 0;
  std::string activation = "silu";
};

enum class KernelType { linear, poly, rbf, sigmoid };

struct SvrKernel {
  KernelType type = KernelType::rbf;
  int degree = 3;
  std::optional<double> gamma;  ///< 1 / (n_features * var(X)) when empty
  double coef0 = 0.0;
};

struct SvrConfig {
  double c = 1.0;
  double epsilon = 0.1;
  SvrKernel kernel;
  long max_iter = 10000000;
  double tol = 1e-3;
};

using LearnerConfig = std::variant<MeanConfig, RidgeConfig, LassoConfig, TreeConfig, ForestConfig,
                                   BoostingConfig, GprConfig, MlpConfig, SvrConfig>;

/// Short learner name: mean, ridge, lasso, tree, rf, gb, gpr, mlp, svr.
std::string learner_name(const LearnerConfig& cfg);
/// Default configuration for a learner name. "xgb" is boosting with the usual
/// regularized defaults (l2 = 1, learning rate 0.3, depth 6).
LearnerConfig default_config(const std::string& name);
/// Copy with the random seed replaced (no-op for deterministic learners).
LearnerConfig with_seed(const LearnerConfig& cfg, std::uint64_t seed);
/// Throws ValidationError when a count is < 1 or a rate/variance/tolerance is not > 0.
void validate_config(const LearnerConfig& cfg);

std::string_view to_string(KernelType k);
std::optional<KernelType> parse_kernel(std::string_view s);

nlohmann::json config_to_json(const LearnerConfig& cfg);
LearnerConfig config_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Fitted parameters
// ---------------------------------------------------------------------------

struct MeanParams {
  double value = 0.0;
};

struct LinearParams {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  int iterations = 0;
};

struct TreeParams {
  Tree tree;
};

struct ForestParams {
  std::vector<Tree> trees;
};

struct BoostingParams {
  double base = 0.0;
  std::vector<Tree> trees;        ///< leaf values include the learning rate
  std::vector<double> train_loss;  ///< mean squared error after 0..n stages
};

struct GprParams {
  Eigen::MatrixXd x_train;
  Eigen::VectorXd alpha;  ///< (K + noise I)^-1 y_normalized
  double y_mean = 0.0;
  double y_scale = 1.0;
  double jitter = 0.0;
  Eigen::MatrixXd chol;  ///< lower Cholesky factor, rebuilt on load
};

struct MlpParams {
  std::vector<Eigen::MatrixXd> weights;  ///< layer l maps width[l] -> width[l+1]
  std::vector<Eigen::VectorXd> biases;
  double y_mean = 0.0;
  double y_scale = 1.0;
  std::string activation = "silu";
};

struct SvrParams {
  Eigen::MatrixXd support;
  Eigen::VectorXd coef;  ///< alpha_i - alpha_i^*, in [-C, C]
  double rho = 0.0;
  SvrKernel kernel;      ///< gamma resolved
  long iterations = 0;
};

using ModelParams = std::variant<MeanParams, LinearParams, TreeParams, ForestParams, BoostingParams,
                                 GprParams, MlpParams, SvrParams>;

struct TrainedModel {
  LearnerConfig config;
  ModelParams params;
  std::uint64_t schema_fingerprint = 0;
  std::size_t n_features = 0;
  bool converged = true;
};

/// Fits on raw matrices. Throws ValidationError for non-finite input or fewer than 2
/// rows, ConvergenceError when the GPR kernel cannot be factorized.
TrainedModel fit(const LearnerConfig& cfg, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
TrainedModel fit(const LearnerConfig& cfg, const FeatureMatrix& x, const Eigen::VectorXd& y);

/// Prediction without schema checks.
Eigen::VectorXd predict_matrix(const TrainedModel& m, const Eigen::MatrixXd& x);
/// Rejects matrices whose schema fingerprint differs from the training schema.
Eigen::VectorXd predict(const TrainedModel& m, const FeatureMatrix& x);

/// Posterior mean and variance (variance clamped at 0).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gpr_predict(const TrainedModel& m,
                                                        const Eigen::MatrixXd& x);

/// A tree ensemble read as f(x) = base + scale * sum_t tree_t(x).
struct TreeEnsembleView {
  double base = 0.0;
  double scale = 1.0;
  std::vector<const Tree*> trees;
};
std::optional<TreeEnsembleView> tree_ensemble(const TrainedModel& m);

// Learner internals exposed for tests.

Eigen::MatrixXd svr_kernel_matrix(const SvrKernel& k, const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& b);
double resolve_gamma(const Eigen::MatrixXd& x);

/// Loss 0.5 * mean(err^2) + 0.5 * alpha * sum(W^2) / n on standardized targets and the
/// gradient with respect to every weight and bias (same layout as the parameters).
std::pair<double, MlpParams> mlp_loss_and_gradient(const MlpParams& p, const Eigen::MatrixXd& x,
                                                   const Eigen::VectorXd& y_scaled, double alpha);
/// Glorot-uniform weights for layer widths [inputs, hidden..., 1].
MlpParams mlp_init(const std::vector<int>& widths, std::uint64_t seed,
                   const std::string& activation = "silu");
/// Network output on the standardized target scale.
Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::MatrixXd& x);

// ---------------------------------------------------------------------------
// Serialization (canonical JSON, format_version 1)
// ---------------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const TrainedModel& m);
/// Throws SchemaError on a malformed document or an unsupported format_version.
TrainedModel model_from_json(const nlohmann::json& j);
void save_model(const TrainedModel& m, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

}  // namespace mamprop
