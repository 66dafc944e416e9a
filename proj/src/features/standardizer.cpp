#include <cmath>

#include "mamprop/error.hpp"
#include "mamprop/features.hpp"

namespace mamprop {

Standardizer fit_standardizer(const FeatureMatrix& x, bool standardize_onehot) {
  if (x.rows() == 0 || x.cols() == 0) throw ValidationError("cannot fit a standardizer on an empty matrix");
  Standardizer s;
  const auto n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto origin = x.schema[static_cast<std::size_t>(j)].origin;
    const bool active = origin != ColumnOrigin::one_hot || standardize_onehot;
    const double mean = x.values.col(j).sum() / n;
    const double var = (x.values.col(j).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    // a column that is constant up to rounding still counts as constant
    const bool flat = sd <= 1e-12 * std::max(1.0, std::abs(mean));
    s.active.push_back(active);
    s.means.push_back(active ? mean : 0.0);
    s.stds.push_back(active && !flat ? sd : 1.0);
    s.passthrough.push_back(active && flat);
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != means.size()) {
    throw SchemaError("standardizer expects " + std::to_string(means.size()) + " columns, got " +
                      std::to_string(x.cols()));
  }
  Eigen::MatrixXd z = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (!active[k]) continue;
    z.col(j) = (x.col(j).array() - means[k]) / stds[k];
  }
  return z;
}

Eigen::MatrixXd Standardizer::invert(const Eigen::MatrixXd& z) const {
  Eigen::MatrixXd x = z;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (!active[k]) continue;
    x.col(j) = z.col(j).array() * stds[k] + means[k];
  }
  return x;
}

nlohmann::json Standardizer::to_json() const {
  return {{"means", means}, {"stds", stds}, {"passthrough", passthrough}, {"active", active}};
}

Standardizer Standardizer::from_json(const nlohmann::json& j) {
  try {
    Standardizer s;
    s.means = j.at("means").get<std::vector<double>>();
    s.stds = j.at("stds").get<std::vector<double>>();
    s.passthrough = j.at("passthrough").get<std::vector<bool>>();
    s.active = j.at("active").get<std::vector<bool>>();
    const auto n = s.means.size();
    if (s.stds.size() != n || s.passthrough.size() != n || s.active.size() != n) {
      throw SchemaError("standardizer arrays differ in length");
    }
    for (double sd : s.stds) {
      if (!(sd > 0.0)) throw SchemaError("standardizer has a non-positive scale");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed standardizer: ") + e.what());
  }
}

FeatureMatrix apply_standardizer(const Standardizer& s, const FeatureMatrix& x) {
  FeatureMatrix out = x;
  out.values = s.apply(x.values);
  return out;
}

}  // namespace mamprop
