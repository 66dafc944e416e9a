#pragma once

#include "mamprop/learners.hpp"

namespace mamprop::detail {

LinearParams fit_ridge(const RidgeConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
LinearParams fit_lasso(const LassoConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       bool& converged);

TreeParams fit_tree(const TreeConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
ForestParams fit_forest(const ForestConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
BoostingParams fit_boosting(const BoostingConfig& c, const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& y);
Eigen::VectorXd predict_forest(const ForestParams& p, const Eigen::MatrixXd& x);
Eigen::VectorXd predict_boosting(const BoostingParams& p, const Eigen::MatrixXd& x);

GprParams fit_gpr(const GprConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
/// Rebuilds the Cholesky factor from the stored inputs and jitter.
void gpr_factorize(GprParams& p, const GprConfig& c);
Eigen::MatrixXd gpr_kernel(const GprConfig& c, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

MlpParams fit_mlp(const MlpConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

SvrParams fit_svr(const SvrConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  bool& converged);
Eigen::VectorXd predict_svr(const SvrParams& p, const Eigen::MatrixXd& x);

}  // namespace mamprop::detail
