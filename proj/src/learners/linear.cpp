#include <cmath>

#include "internal.hpp"

namespace mamprop::detail {

namespace {

struct Centered {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::RowVectorXd x_mean;
  double y_mean = 0.0;
};

Centered center(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Centered c;
  c.x_mean = x.colwise().mean();
  c.y_mean = y.mean();
  c.x = x.rowwise() - c.x_mean;
  c.y = y.array() - c.y_mean;
  return c;
}

double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

LinearParams fit_ridge(const RidgeConfig& cfg, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Centered c = center(x, y);
  Eigen::MatrixXd gram = c.x.transpose() * c.x;
  const Eigen::VectorXd rhs = c.x.transpose() * c.y;
  LinearParams p;
  if (cfg.lambda > 0.0) {
    gram.diagonal().array() += cfg.lambda;
    p.weights = gram.ldlt().solve(rhs);
  } else {
    // minimum-norm least squares; one-hot blocks make the centered design rank deficient
    p.weights = c.x.completeOrthogonalDecomposition().solve(c.y);
  }
  p.intercept = c.y_mean - c.x_mean.dot(p.weights);
  return p;
}

LinearParams fit_lasso(const LassoConfig& cfg, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       bool& converged) {
  const Centered c = center(x, y);
  const auto n = static_cast<double>(x.rows());
  const Eigen::Index p = x.cols();
  const Eigen::VectorXd z = c.x.colwise().squaredNorm().transpose() / n;
  const double scale = std::sqrt(c.y.squaredNorm() / n) + 1e-300;

  LinearParams out;
  out.weights = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = c.y;
  converged = false;

  auto violation = [&]() {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (z(j) == 0.0) continue;
      const double grad = -c.x.col(j).dot(r) / n;
      const double w = out.weights(j);
      const double v = w != 0.0 ? std::abs(grad + cfg.lambda * (w > 0 ? 1.0 : -1.0))
                                : std::max(std::abs(grad) - cfg.lambda, 0.0);
      worst = std::max(worst, v);
    }
    return worst;
  };

  if (violation() <= cfg.tol * scale) {
    converged = true;
  } else {
    for (int it = 1; it <= cfg.max_iter; ++it) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (z(j) == 0.0) continue;
        const double old = out.weights(j);
        const double rho = c.x.col(j).dot(r) / n + z(j) * old;
        const double w = soft(rho, cfg.lambda) / z(j);
        if (w != old) {
          r -= (w - old) * c.x.col(j);
          out.weights(j) = w;
        }
      }
      out.iterations = it;
      if (violation() <= cfg.tol * scale) {
        converged = true;
        break;
      }
    }
  }
  out.intercept = c.y_mean - c.x_mean.dot(out.weights);
  return out;
}

}  // namespace mamprop::detail
