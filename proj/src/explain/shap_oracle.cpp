#include <cmath>

#include "mamprop/error.hpp"
#include "mamprop/explain.hpp"

namespace mamprop {

ShapExplanation exact_shap_oracle(const TrainedModel& m, const Eigen::VectorXd& x,
                                  const Eigen::MatrixXd& background, std::size_t max_features) {
  const auto p = static_cast<std::size_t>(x.size());
  if (p > max_features) {
    throw ValidationError("exact SHAP enumerates 2^M coalitions; M = " + std::to_string(p) +
                          " exceeds the limit of " + std::to_string(max_features));
  }
  if (background.rows() == 0) throw ValidationError("SHAP background is empty");
  if (static_cast<std::size_t>(background.cols()) != p) {
    throw SchemaError("instance and background disagree on the feature count");
  }
  const std::size_t n_sets = std::size_t{1} << p;
  const Eigen::Index nb = background.rows();
  Eigen::VectorXd value(static_cast<Eigen::Index>(n_sets));
  Eigen::MatrixXd z(nb, static_cast<Eigen::Index>(p));
  for (std::size_t s = 0; s < n_sets; ++s) {
    z = background;
    for (std::size_t f = 0; f < p; ++f) {
      if (s >> f & 1u) z.col(static_cast<Eigen::Index>(f)).setConstant(x(static_cast<Eigen::Index>(f)));
    }
    value(static_cast<Eigen::Index>(s)) = predict_matrix(m, z).mean();
  }

  // w(s) = s! (M - s - 1)! / M!
  std::vector<double> weight(p);
  for (std::size_t s = 0; s < p; ++s) {
    weight[s] = std::exp(std::lgamma(s + 1.0) + std::lgamma(static_cast<double>(p - s)) -
                         std::lgamma(p + 1.0));
  }
  ShapExplanation e;
  e.phis = Eigen::VectorXd::Zero(x.size());
  for (std::size_t s = 0; s < n_sets; ++s) {
    const auto size = static_cast<std::size_t>(__builtin_popcountll(s));
    for (std::size_t f = 0; f < p; ++f) {
      if (s >> f & 1u) continue;
      const std::size_t with = s | (std::size_t{1} << f);
      e.phis(static_cast<Eigen::Index>(f)) +=
          weight[size] * (value(static_cast<Eigen::Index>(with)) - value(static_cast<Eigen::Index>(s)));
    }
  }
  e.base_value = value(0);
  e.prediction = value(static_cast<Eigen::Index>(n_sets - 1));
  e.feature_values = x;
  e.schema_fingerprint = m.schema_fingerprint;
  return e;
}

}  // namespace mamprop
