#pragma once

#include <cstdint>

#include "mamprop/explain.hpp"
#include "mamprop/learners.hpp"
#include "mamprop/rng.hpp"

namespace testing {

struct ShapCase {
  mamprop::TrainedModel model;
  Eigen::VectorXd x;
  Eigen::MatrixXd background;
};

// Random forest or boosted ensemble on 2..12 features with an interacting target. Some
// columns take few distinct values so instances often tie with thresholds.
inline ShapCase random_shap_case(std::uint64_t seed) {
  using namespace mamprop;
  Rng rng(derive_seed(seed, {0x73686170}));
  const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.below(11));
  const Eigen::Index n = 80;
  Eigen::MatrixXd x(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      x(i, j) = (j % 3 == 2) ? static_cast<double>(rng.below(3)) : rng.normal();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = 2.0 * x(i, 0) + x(i, 0) * x(i, 1) + 0.3 * rng.normal();
    if (m > 2) y(i) += std::sin(x(i, 2)) - x(i, m - 1);
  }
  ShapCase c;
  if (rng.below(2) == 0) {
    ForestConfig cfg;
    cfg.n_estimators = 3 + static_cast<int>(rng.below(10));
    cfg.max_depth = 2 + static_cast<int>(rng.below(5));
    if (rng.below(2) == 0) cfg.max_features = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(m)));
    cfg.seed = seed;
    c.model = fit(cfg, x, y);
  } else {
    BoostingConfig cfg;
    cfg.n_estimators = 5 + static_cast<int>(rng.below(20));
    cfg.max_depth = 1 + static_cast<int>(rng.below(4));
    cfg.l2_leaf = rng.uniform(0.0, 2.0);
    cfg.l1_leaf = rng.uniform(0.0, 0.2);
    cfg.seed = seed;
    c.model = fit(cfg, x, y);
  }
  const auto bg = sample_background(static_cast<std::size_t>(n), 15 + rng.below(20), derive_seed(seed, {1}));
  c.background.resize(static_cast<Eigen::Index>(bg.size()), m);
  for (std::size_t i = 0; i < bg.size(); ++i) c.background.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(bg[i]));
  c.x = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::size_t>(n)))).transpose();
  if (rng.below(2) == 0) c.x(0) += rng.normal();  // off-sample instance
  return c;
}

}  // namespace testing
