#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace mamprop {

/// Node of a binary regression tree. Rows with x[feature] < threshold go left.
struct TreeNode {
  int feature = -1;  ///< -1 for a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  ///< leaf output (already shrunk for boosted trees)
  double gain = 0.0;   ///< objective reduction of this split
  double cover = 0.0;  ///< training rows reaching the node (with bootstrap multiplicity)

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root

  template <class Row>
  double predict(const Row& x) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
      const TreeNode& n = nodes[static_cast<std::size_t>(i)];
      i = x(n.feature) < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }
  int depth() const;
};

struct TreeGrowth {
  std::optional<int> max_depth;  ///< unlimited when empty
  int min_samples_leaf = 1;
  std::optional<int> max_features;  ///< all features when empty
  double l1 = 0.0;                  ///< soft threshold on leaf sums
  double l2 = 0.0;                  ///< ridge shrinkage on leaf values
  double leaf_scale = 1.0;          ///< learning rate folded into leaf values
};

/// Row indices of x sorted by each column (ties by row index).
struct SortedColumns {
  std::vector<std::vector<std::size_t>> order;
};
SortedColumns presort_columns(const Eigen::MatrixXd& x);

/// Greedy CART on targets g. `rows` lists training rows, repeated rows count with
/// multiplicity (bootstrap). With l1 = l2 = 0 the split gain is the reduction in squared
/// error and leaves hold the mean. `seed` drives the per-node feature subsample.
Tree grow_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& g,
               const std::vector<std::size_t>& rows, const TreeGrowth& opts,
               std::uint64_t seed, const SortedColumns* presorted = nullptr);

}  // namespace mamprop
