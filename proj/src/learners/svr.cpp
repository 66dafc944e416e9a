#include <cmath>
#include <limits>

#include "internal.hpp"

namespace mamprop {

double resolve_gamma(const Eigen::MatrixXd& x) {
  const double n = static_cast<double>(x.size());
  if (n == 0) return 1.0;
  const double mean = x.sum() / n;
  const double var = (x.array() - mean).square().sum() / n;
  return var > 0.0 ? 1.0 / (static_cast<double>(x.cols()) * var) : 1.0;
}

Eigen::MatrixXd svr_kernel_matrix(const SvrKernel& k, const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& b) {
  const double gamma = k.gamma.value_or(1.0);
  const Eigen::MatrixXd dot = a * b.transpose();
  switch (k.type) {
    case KernelType::linear: return dot;
    case KernelType::poly: return (gamma * dot.array() + k.coef0).pow(k.degree).matrix();
    case KernelType::sigmoid: return (gamma * dot.array() + k.coef0).tanh().matrix();
    case KernelType::rbf: {
      Eigen::MatrixXd d2 = (-2.0 * dot).colwise() + a.rowwise().squaredNorm();
      d2.rowwise() += b.rowwise().squaredNorm().transpose();
      return (-gamma * d2.array().max(0.0)).exp().matrix();
    }
  }
  return dot;
}

namespace detail {

// Dual of epsilon-SVR over 2n variables (alpha then alpha*), solved with the
// second-order working set selection of the LIBSVM solver.
SvrParams fit_svr(const SvrConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  bool& converged) {
  const Eigen::Index n = x.rows();
  const Eigen::Index l = 2 * n;
  const double tau = 1e-12;
  SvrParams out;
  out.kernel = c.kernel;
  if (!out.kernel.gamma) out.kernel.gamma = resolve_gamma(x);
  const Eigen::MatrixXd k = svr_kernel_matrix(out.kernel, x, x);

  std::vector<signed char> sign(static_cast<std::size_t>(l));
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(l);
  Eigen::VectorXd grad(l);
  for (Eigen::Index i = 0; i < n; ++i) {
    sign[static_cast<std::size_t>(i)] = 1;
    sign[static_cast<std::size_t>(i + n)] = -1;
    grad(i) = c.epsilon - y(i);
    grad(i + n) = c.epsilon + y(i);
  }
  auto yv = [&](Eigen::Index i) { return static_cast<double>(sign[static_cast<std::size_t>(i)]); };
  auto q = [&](Eigen::Index i, Eigen::Index j) { return yv(i) * yv(j) * k(i % n, j % n); };
  auto upper = [&](Eigen::Index i) { return alpha(i) >= c.c; };
  auto lower = [&](Eigen::Index i) { return alpha(i) <= 0.0; };
  const double cap = c.c;

  converged = false;
  long iter = 0;
  while (iter < c.max_iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < l; ++t) {
      if (yv(t) > 0) {
        if (!upper(t) && -grad(t) >= gmax) {
          gmax = -grad(t);
          i = t;
        }
      } else if (!lower(t) && grad(t) >= gmax) {
        gmax = grad(t);
        i = t;
      }
    }
    double best = std::numeric_limits<double>::infinity();
    const double qii = i >= 0 ? k(i % n, i % n) : 0.0;
    for (Eigen::Index t = 0; t < l && i >= 0; ++t) {
      const double qtt = k(t % n, t % n);
      if (yv(t) > 0) {
        if (lower(t)) continue;
        const double diff = gmax + grad(t);
        if (grad(t) >= gmax2) gmax2 = grad(t);
        if (diff > 0) {
          double quad = qii + qtt - 2.0 * yv(i) * q(i, t);
          if (quad <= 0) quad = tau;
          const double obj = -(diff * diff) / quad;
          if (obj <= best) {
            j = t;
            best = obj;
          }
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - grad(t);
        if (-grad(t) >= gmax2) gmax2 = -grad(t);
        if (diff > 0) {
          double quad = qii + qtt + 2.0 * yv(i) * q(i, t);
          if (quad <= 0) quad = tau;
          const double obj = -(diff * diff) / quad;
          if (obj <= best) {
            j = t;
            best = obj;
          }
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < c.tol) {
      converged = true;
      break;
    }
    ++iter;

    const double old_i = alpha(i), old_j = alpha(j);
    const double qij = q(i, j);
    const double qii_ = k(i % n, i % n), qjj = k(j % n, j % n);
    if (sign[static_cast<std::size_t>(i)] != sign[static_cast<std::size_t>(j)]) {
      double quad = qii_ + qjj + 2.0 * qij;
      if (quad <= 0) quad = tau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) {
          alpha(j) = 0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > cap) {
          alpha(i) = cap;
          alpha(j) = cap - diff;
        }
      } else if (alpha(j) > cap) {
        alpha(j) = cap;
        alpha(i) = cap + diff;
      }
    } else {
      double quad = qii_ + qjj - 2.0 * qij;
      if (quad <= 0) quad = tau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > cap) {
        if (alpha(i) > cap) {
          alpha(i) = cap;
          alpha(j) = sum - cap;
        }
      } else if (alpha(j) < 0) {
        alpha(j) = 0;
        alpha(i) = sum;
      }
      if (sum > cap) {
        if (alpha(j) > cap) {
          alpha(j) = cap;
          alpha(i) = sum - cap;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = sum;
      }
    }
    const double di = alpha(i) - old_i, dj = alpha(j) - old_j;
    for (Eigen::Index t = 0; t < l; ++t) grad(t) += q(i, t) * di + q(j, t) * dj;
  }
  out.iterations = iter;

  double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0.0;
  long n_free = 0;
  for (Eigen::Index t = 0; t < l; ++t) {
    const double yg = yv(t) * grad(t);
    if (upper(t)) {
      if (yv(t) < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (yv(t) > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  out.rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : 0.5 * (ub + lb);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (alpha(i) - alpha(i + n) != 0.0) keep.push_back(i);
  }
  out.support.resize(static_cast<Eigen::Index>(keep.size()), x.cols());
  out.coef.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t s = 0; s < keep.size(); ++s) {
    out.support.row(static_cast<Eigen::Index>(s)) = x.row(keep[s]);
    out.coef(static_cast<Eigen::Index>(s)) = alpha(keep[s]) - alpha(keep[s] + n);
  }
  return out;
}

Eigen::VectorXd predict_svr(const SvrParams& p, const Eigen::MatrixXd& x) {
  if (p.coef.size() == 0) return Eigen::VectorXd::Constant(x.rows(), -p.rho);
  return (svr_kernel_matrix(p.kernel, x, p.support) * p.coef).array() - p.rho;
}

}  // namespace detail

}  // namespace mamprop
