#include <algorithm>
#include <numeric>

#include "internal.hpp"
#include "mamprop/parallel.hpp"
#include "mamprop/rng.hpp"

namespace mamprop::detail {

namespace {

std::vector<std::size_t> all_rows(Eigen::Index n) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

double mse(const Eigen::VectorXd& y, const Eigen::VectorXd& f) {
  return (y - f).squaredNorm() / static_cast<double>(y.size());
}

}  // namespace

TreeParams fit_tree(const TreeConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  TreeGrowth g;
  g.max_depth = c.max_depth;
  g.min_samples_leaf = c.min_samples_leaf;
  return {grow_tree(x, y, all_rows(x.rows()), g, 0)};
}

ForestParams fit_forest(const ForestConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  TreeGrowth g;
  g.max_depth = c.max_depth;
  g.min_samples_leaf = c.min_samples_leaf;
  g.max_features = c.max_features;
  const SortedColumns sorted = presort_columns(x);
  const auto n = static_cast<std::size_t>(x.rows());

  ForestParams p;
  p.trees.resize(static_cast<std::size_t>(c.n_estimators));
  parallel_for(p.trees.size(), [&](std::size_t t) {
    Rng rng(derive_seed(c.seed, {0x7265u, t}));
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = rng.below(n);
    std::sort(rows.begin(), rows.end());
    p.trees[t] = grow_tree(x, y, rows, g, derive_seed(c.seed, {0x6665u, t}), &sorted);
  });
  return p;
}

Eigen::VectorXd predict_forest(const ForestParams& p, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  std::vector<double> preds(p.trees.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    for (std::size_t t = 0; t < p.trees.size(); ++t) preds[t] = p.trees[t].predict(row);
    // offset by the smallest tree output so constant forests average exactly
    const double lo = *std::min_element(preds.begin(), preds.end());
    double acc = 0.0;
    for (double v : preds) acc += v - lo;
    out(i) = lo + acc / static_cast<double>(preds.size());
  }
  return out;
}

BoostingParams fit_boosting(const BoostingConfig& c, const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& y) {
  TreeGrowth g;
  g.max_depth = c.max_depth;
  g.min_samples_leaf = c.min_samples_leaf;
  g.l1 = c.l1_leaf;
  g.l2 = c.l2_leaf;
  g.leaf_scale = c.learning_rate;
  const SortedColumns sorted = presort_columns(x);
  const auto n = static_cast<std::size_t>(x.rows());

  BoostingParams p;
  p.base = y.mean();
  Eigen::VectorXd f = Eigen::VectorXd::Constant(x.rows(), p.base);
  p.train_loss.push_back(mse(y, f));
  std::vector<std::size_t> rows = all_rows(x.rows());
  for (int stage = 0; stage < c.n_estimators; ++stage) {
    if (c.subsample < 1.0) {
      rows = all_rows(x.rows());
      Rng rng(derive_seed(c.seed, {0x7362u, static_cast<std::uint64_t>(stage)}));
      rng.shuffle(rows);
      const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(c.subsample * static_cast<double>(n)));
      rows.resize(keep);
      std::sort(rows.begin(), rows.end());
    }
    const Eigen::VectorXd residual = y - f;
    Tree tree = grow_tree(x, residual, rows, g, derive_seed(c.seed, {0x6762u, static_cast<std::uint64_t>(stage)}), &sorted);
    if (tree.nodes.size() == 1) break;
    for (Eigen::Index i = 0; i < x.rows(); ++i) f(i) += tree.predict(x.row(i));
    p.trees.push_back(std::move(tree));
    p.train_loss.push_back(mse(y, f));
  }
  return p;
}

Eigen::VectorXd predict_boosting(const BoostingParams& p, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(x.rows(), p.base);
  for (const auto& t : p.trees) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) += t.predict(x.row(i));
  }
  return out;
}

}  // namespace mamprop::detail
