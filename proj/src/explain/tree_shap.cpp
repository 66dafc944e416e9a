#include <algorithm>
#include <cmath>

#include "mamprop/error.hpp"
#include "mamprop/explain.hpp"
#include "mamprop/parallel.hpp"
#include "mamprop/rng.hpp"

namespace mamprop {

namespace {

// coef(s, t) = s! t! / (s + t + 1)!
double coef(int s, int t) {
  return std::exp(std::lgamma(s + 1.0) + std::lgamma(t + 1.0) - std::lgamma(s + t + 2.0));
}

struct Walker {
  const Tree& tree;
  const Eigen::VectorXd& x;
  const Eigen::RowVectorXd& b;
  Eigen::VectorXd& phi;
  std::vector<signed char>& side;  // 0 unused, 1 follows x, 2 follows b
  std::vector<int> path;           // features with side != 0
  int n_x = 0;
  int n_b = 0;

  void leaf(double v) {
    if (path.empty()) return;
    const double wx = n_x > 0 ? v * coef(n_x - 1, n_b) : 0.0;
    const double wb = n_b > 0 ? v * coef(n_x, n_b - 1) : 0.0;
    for (int f : path) {
      if (side[static_cast<std::size_t>(f)] == 1) {
        phi(f) += wx;
      } else {
        phi(f) -= wb;
      }
    }
  }

  void visit(int node) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf()) {
      leaf(n.value);
      return;
    }
    const auto f = static_cast<std::size_t>(n.feature);
    const int cx = x(n.feature) < n.threshold ? n.left : n.right;
    const int cb = b(n.feature) < n.threshold ? n.left : n.right;
    if (side[f] == 1) {
      visit(cx);
    } else if (side[f] == 2) {
      visit(cb);
    } else if (cx == cb) {
      visit(cx);
    } else {
      path.push_back(n.feature);
      side[f] = 1;
      ++n_x;
      visit(cx);
      --n_x;
      side[f] = 2;
      ++n_b;
      visit(cb);
      --n_b;
      side[f] = 0;
      path.pop_back();
    }
  }
};

}  // namespace

ShapExplanation tree_shap(const TrainedModel& m, const Eigen::VectorXd& x,
                          const Eigen::MatrixXd& background) {
  const auto view = tree_ensemble(m);
  if (!view) throw ValidationError("tree SHAP needs a tree-based model, got '" + learner_name(m.config) + "'");
  if (background.rows() == 0) throw ValidationError("SHAP background is empty");
  if (static_cast<std::size_t>(x.size()) != m.n_features ||
      static_cast<std::size_t>(background.cols()) != m.n_features) {
    throw SchemaError("instance, background and model disagree on the feature count");
  }
  const auto p = static_cast<std::size_t>(x.size());
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(x.size());
  std::vector<signed char> side(p, 0);
  for (const Tree* t : view->trees) {
    for (Eigen::Index r = 0; r < background.rows(); ++r) {
      const Eigen::RowVectorXd b = background.row(r);
      Walker w{*t, x, b, phi, side, {}, 0, 0};
      w.visit(0);
    }
  }
  ShapExplanation e;
  e.phis = phi * (view->scale / static_cast<double>(background.rows()));
  const Eigen::VectorXd bg_pred = predict_matrix(m, background);
  e.base_value = bg_pred.mean();
  e.prediction = predict_matrix(m, x.transpose())(0);
  e.feature_values = x;
  e.schema_fingerprint = m.schema_fingerprint;
  return e;
}

std::vector<std::size_t> sample_background(std::size_t rows, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(rows);
  for (std::size_t i = 0; i < rows; ++i) idx[i] = i;
  if (rows <= n) return idx;
  Rng rng(seed);
  rng.shuffle(idx);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

GroupedExplanations aggregate_groups(const std::vector<ShapExplanation>& ex, const FeatureSchema& schema) {
  GroupedExplanations out;
  const auto groups = schema.groups();
  for (const auto& g : groups) out.names.push_back(g.name);
  for (const auto& e : ex) {
    if (static_cast<std::size_t>(e.phis.size()) != schema.size()) {
      throw SchemaError("explanation width does not match the schema");
    }
    ShapExplanation a;
    a.base_value = e.base_value;
    a.prediction = e.prediction;
    a.schema_fingerprint = e.schema_fingerprint;
    a.phis.resize(static_cast<Eigen::Index>(groups.size()));
    a.feature_values.resize(static_cast<Eigen::Index>(groups.size()));
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const auto& g = groups[gi];
      const auto gi_ = static_cast<Eigen::Index>(gi);
      a.phis(gi_) = e.phis.segment(static_cast<Eigen::Index>(g.first), static_cast<Eigen::Index>(g.count)).sum();
      if (g.count == 1 && schema[g.first].origin != ColumnOrigin::one_hot) {
        a.feature_values(gi_) = e.feature_values(static_cast<Eigen::Index>(g.first));
      } else {
        double level = -1.0;
        for (std::size_t j = 0; j < g.count; ++j) {
          if (e.feature_values(static_cast<Eigen::Index>(g.first + j)) > 0.5) level = static_cast<double>(j);
        }
        a.feature_values(gi_) = level;
      }
    }
    out.explanations.push_back(std::move(a));
  }
  return out;
}

}  // namespace mamprop
