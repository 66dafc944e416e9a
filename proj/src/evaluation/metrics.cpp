#include <cmath>

#include "mamprop/error.hpp"
#include "mamprop/evaluation.hpp"

namespace mamprop {

double r2(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
  if (y.size() != yhat.size()) throw ValidationError("r2: length mismatch");
  if (y.size() < 2) throw ValidationError("r2 needs at least 2 values");
  const double mean = y.mean();
  const double sst = (y.array() - mean).square().sum();
  if (!(sst > 0.0)) throw ValidationError("r2 is undefined for constant targets");
  const double sse = (y - yhat).squaredNorm();
  return 1.0 - sse / sst;
}

double mae(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
  if (y.size() != yhat.size()) throw ValidationError("mae: length mismatch");
  if (y.size() < 1) throw ValidationError("mae needs at least 1 value");
  return (y - yhat).cwiseAbs().mean();
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace mamprop
