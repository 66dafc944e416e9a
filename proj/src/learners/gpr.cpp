#include <cmath>

#include "internal.hpp"
#include "mamprop/error.hpp"

namespace mamprop::detail {

Eigen::MatrixXd gpr_kernel(const GprConfig& c, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::VectorXd an = a.rowwise().squaredNorm();
  const Eigen::VectorXd bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = (-2.0 * a * b.transpose()).colwise() + an;
  d2.rowwise() += bn.transpose();
  const double inv = 1.0 / (2.0 * c.length_scale * c.length_scale);
  return (c.signal_var * (-(d2.array().max(0.0)) * inv).exp()).matrix();
}

void gpr_factorize(GprParams& p, const GprConfig& c) {
  Eigen::MatrixXd k = gpr_kernel(c, p.x_train, p.x_train);
  k.diagonal().array() += c.noise_var + p.jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) throw ConvergenceError("GPR kernel matrix is not positive definite");
  p.chol = llt.matrixL();
}

GprParams fit_gpr(const GprConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  GprParams p;
  p.x_train = x;
  p.y_mean = y.mean();
  const double sd = std::sqrt((y.array() - p.y_mean).square().mean());
  p.y_scale = sd > 0.0 ? sd : 1.0;
  const Eigen::VectorXd yn = (y.array() - p.y_mean) / p.y_scale;

  const Eigen::MatrixXd k = gpr_kernel(c, x, x);
  double jitter = 0.0;
  while (true) {
    Eigen::MatrixXd kk = k;
    kk.diagonal().array() += c.noise_var + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(kk);
    if (llt.info() == Eigen::Success) {
      p.jitter = jitter;
      p.chol = llt.matrixL();
      p.alpha = llt.solve(yn);
      return p;
    }
    if (jitter == 0.0) {
      jitter = 1e-10;
    } else if (jitter < 1e-4 * 0.5) {
      jitter *= 10.0;
    } else {
      throw ConvergenceError("GPR kernel matrix is not positive definite even with jitter 1e-4");
    }
  }
}

}  // namespace mamprop::detail
