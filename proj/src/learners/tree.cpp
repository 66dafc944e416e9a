#include <algorithm>
#include <cmath>
#include <numeric>

#include "mamprop/rng.hpp"
#include "mamprop/tree.hpp"

namespace mamprop {

namespace {

double soft(double g, double l1) {
  if (g > l1) return g - l1;
  if (g < -l1) return g + l1;
  return 0.0;
}

struct Pending {
  int node;
  std::size_t begin;
  std::size_t end;
  int depth;
};

}  // namespace

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.is_leaf()) continue;
    d[static_cast<std::size_t>(n.left)] = d[i] + 1;
    d[static_cast<std::size_t>(n.right)] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

SortedColumns presort_columns(const Eigen::MatrixXd& x) {
  SortedColumns s;
  s.order.resize(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    auto& o = s.order[static_cast<std::size_t>(f)];
    o.resize(static_cast<std::size_t>(x.rows()));
    std::iota(o.begin(), o.end(), std::size_t{0});
    std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) {
      return x(static_cast<Eigen::Index>(a), f) < x(static_cast<Eigen::Index>(b), f);
    });
  }
  return s;
}

Tree grow_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& g,
               const std::vector<std::size_t>& rows, const TreeGrowth& opts, std::uint64_t seed,
               const SortedColumns* presorted) {
  const std::size_t m = rows.size();
  const std::size_t p = static_cast<std::size_t>(x.cols());
  const bool plain = opts.l1 == 0.0 && opts.l2 == 0.0;
  const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, opts.min_samples_leaf));

  SortedColumns local;
  if (!presorted) {
    local = presort_columns(x);
    presorted = &local;
  }
  // positions of each source row inside the sample, so bootstrap duplicates stay together
  std::vector<std::vector<std::size_t>> slots(static_cast<std::size_t>(x.rows()));
  for (std::size_t k = 0; k < m; ++k) slots[rows[k]].push_back(k);
  std::vector<std::vector<std::size_t>> order(p);
  for (std::size_t f = 0; f < p; ++f) {
    order[f].reserve(m);
    for (std::size_t r : presorted->order[f]) {
      for (std::size_t k : slots[r]) order[f].push_back(k);
    }
  }

  auto xv = [&](std::size_t pos, std::size_t f) {
    return x(static_cast<Eigen::Index>(rows[pos]), static_cast<Eigen::Index>(f));
  };
  auto gv = [&](std::size_t pos) { return g(static_cast<Eigen::Index>(rows[pos])); };

  std::vector<std::size_t> features(p);
  std::iota(features.begin(), features.end(), std::size_t{0});
  const std::size_t n_try =
      opts.max_features ? std::min<std::size_t>(p, static_cast<std::size_t>(std::max(1, *opts.max_features))) : p;
  Rng rng(seed);

  Tree tree;
  tree.nodes.emplace_back();
  std::vector<std::size_t> identity(m);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  std::vector<char> goes_left(m, 0);
  std::vector<std::size_t> buffer(m);
  std::vector<Pending> stack = {{0, 0, m, 0}};

  while (!stack.empty()) {
    const Pending w = stack.back();
    stack.pop_back();
    const std::size_t n = w.end - w.begin;
    const auto& seg = p ? order[0] : identity;

    const double shift = n ? gv(seg[w.begin]) : 0.0;
    double total = 0.0, shifted = 0.0;
    for (std::size_t t = w.begin; t < w.end; ++t) {
      total += gv(seg[t]);
      shifted += gv(seg[t]) - shift;
    }
    const double mean = n ? shift + shifted / static_cast<double>(n) : 0.0;
    double sse = 0.0;
    for (std::size_t t = w.begin; t < w.end; ++t) sse += (gv(seg[t]) - mean) * (gv(seg[t]) - mean);

    TreeNode& node = tree.nodes[static_cast<std::size_t>(w.node)];
    node.cover = static_cast<double>(n);
    node.value = opts.leaf_scale *
                 (plain ? mean : soft(total, opts.l1) / (static_cast<double>(n) + opts.l2));

    const bool depth_ok = !opts.max_depth || w.depth < *opts.max_depth;
    if (!depth_ok || n < 2 * min_leaf || !(sse > 0.0) || p == 0) continue;

    if (n_try < p) {
      std::iota(features.begin(), features.end(), std::size_t{0});
      for (std::size_t i = 0; i < n_try; ++i) std::swap(features[i], features[i + rng.below(p - i)]);
      std::sort(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(n_try));
    }

    const double parent_term =
        plain ? 0.0 : std::pow(soft(total, opts.l1), 2) / (static_cast<double>(n) + opts.l2);
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::size_t best_left = 0;
    for (std::size_t fi = 0; fi < n_try; ++fi) {
      const std::size_t f = features[fi];
      const auto& o = order[f];
      double left_sum = 0.0;
      for (std::size_t t = w.begin; t + 1 < w.end; ++t) {
        left_sum += plain ? gv(o[t]) - mean : gv(o[t]);
        const std::size_t n_left = t - w.begin + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < min_leaf) continue;
        if (n_right < min_leaf) break;
        const double lo = xv(o[t], f);
        const double hi = xv(o[t + 1], f);
        if (!(lo < hi)) continue;
        double gain;
        if (plain) {
          gain = left_sum * left_sum *
                 (1.0 / static_cast<double>(n_left) + 1.0 / static_cast<double>(n_right));
        } else {
          const double gl = soft(left_sum, opts.l1);
          const double gr = soft(total - left_sum, opts.l1);
          gain = gl * gl / (static_cast<double>(n_left) + opts.l2) +
                 gr * gr / (static_cast<double>(n_right) + opts.l2) - parent_term;
        }
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          double thr = 0.5 * (lo + hi);
          if (!(lo < thr)) thr = hi;
          best_threshold = thr;
          best_left = n_left;
        }
      }
    }
    if (best_feature < 0 || !(best_gain > 1e-12 * sse)) continue;

    const auto bf = static_cast<std::size_t>(best_feature);
    for (std::size_t t = w.begin; t < w.end; ++t) goes_left[order[bf][t]] = t < w.begin + best_left;
    for (std::size_t f = 0; f < p; ++f) {
      auto& o = order[f];
      std::size_t l = w.begin, r = 0;
      for (std::size_t t = w.begin; t < w.end; ++t) {
        if (goes_left[o[t]]) {
          o[l++] = o[t];
        } else {
          buffer[r++] = o[t];
        }
      }
      std::copy(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(r),
                o.begin() + static_cast<std::ptrdiff_t>(l));
    }

    const int left = static_cast<int>(tree.nodes.size());
    const int right = left + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& parent = tree.nodes[static_cast<std::size_t>(w.node)];
    parent.feature = best_feature;
    parent.threshold = best_threshold;
    parent.left = left;
    parent.right = right;
    parent.gain = best_gain;
    stack.push_back({right, w.begin + best_left, w.end, w.depth + 1});
    stack.push_back({left, w.begin, w.begin + best_left, w.depth + 1});
  }
  return tree;
}

}  // namespace mamprop
