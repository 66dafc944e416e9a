#include <cmath>

#include "internal.hpp"
#include "mamprop/rng.hpp"

namespace mamprop {

namespace {

Eigen::ArrayXXd activate(const std::string& kind, const Eigen::ArrayXXd& z) {
  if (kind == "relu") return z.max(0.0);
  if (kind == "tanh") return z.tanh();
  return z / (1.0 + (-z).exp());
}

Eigen::ArrayXXd activate_grad(const std::string& kind, const Eigen::ArrayXXd& z) {
  if (kind == "relu") return (z > 0.0).cast<double>();
  if (kind == "tanh") return 1.0 - z.tanh().square();
  const Eigen::ArrayXXd s = 1.0 / (1.0 + (-z).exp());
  return s * (1.0 + z * (1.0 - s));
}

struct Pass {
  std::vector<Eigen::MatrixXd> pre;   // pre-activations per layer
  std::vector<Eigen::MatrixXd> post;  // post[0] = input
};

Pass forward_pass(const MlpParams& p, const Eigen::MatrixXd& x) {
  Pass pass;
  pass.post.push_back(x);
  const std::size_t layers = p.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = pass.post.back() * p.weights[l].transpose();
    z.rowwise() += p.biases[l].transpose();
    pass.pre.push_back(z);
    if (l + 1 < layers) {
      pass.post.push_back(activate(p.activation, z.array()).matrix());
    } else {
      pass.post.push_back(z);
    }
  }
  return pass;
}

}  // namespace

MlpParams mlp_init(const std::vector<int>& widths, std::uint64_t seed, const std::string& activation) {
  MlpParams p;
  p.activation = activation;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int fan_in = widths[l];
    const int fan_out = widths[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Rng rng(derive_seed(seed, {0x6d6cu, l}));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-limit, limit);
    }
    Eigen::VectorXd b(fan_out);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-limit, limit);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::MatrixXd& x) {
  return forward_pass(p, x).post.back().col(0);
}

std::pair<double, MlpParams> mlp_loss_and_gradient(const MlpParams& p, const Eigen::MatrixXd& x,
                                                   const Eigen::VectorXd& y_scaled, double alpha) {
  const Pass pass = forward_pass(p, x);
  const auto n = static_cast<double>(x.rows());
  const Eigen::VectorXd err = pass.post.back().col(0) - y_scaled;
  double penalty = 0.0;
  for (const auto& w : p.weights) penalty += w.squaredNorm();
  const double loss = 0.5 * err.squaredNorm() / n + 0.5 * alpha * penalty / n;

  MlpParams grad = p;
  Eigen::MatrixXd dz = err / n;
  for (std::size_t l = p.weights.size(); l-- > 0;) {
    grad.weights[l] = dz.transpose() * pass.post[l] + (alpha / n) * p.weights[l];
    grad.biases[l] = dz.colwise().sum().transpose();
    if (l > 0) {
      const Eigen::MatrixXd dh = dz * p.weights[l];
      dz = (dh.array() * activate_grad(p.activation, pass.pre[l - 1].array())).matrix();
    }
  }
  return {loss, grad};
}

namespace detail {

MlpParams fit_mlp(const MlpConfig& c, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  std::vector<int> widths = {static_cast<int>(x.cols())};
  widths.insert(widths.end(), c.layer_sizes.begin(), c.layer_sizes.end());
  widths.push_back(1);
  MlpParams p = mlp_init(widths, c.seed, c.activation);
  p.y_mean = y.mean();
  const double sd = std::sqrt((y.array() - p.y_mean).square().mean());
  p.y_scale = sd > 0.0 ? sd : 1.0;
  const Eigen::VectorXd ys = (y.array() - p.y_mean) / p.y_scale;

  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    mw.push_back(Eigen::MatrixXd::Zero(p.weights[l].rows(), p.weights[l].cols()));
    vw.push_back(mw.back());
    mb.push_back(Eigen::VectorXd::Zero(p.biases[l].size()));
    vb.push_back(mb.back());
  }

  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t batch = std::min<std::size_t>(n, static_cast<std::size_t>(c.batch_size));
  std::vector<Eigen::Index> perm(n);
  long step = 0;
  for (int epoch = 0; epoch < c.epochs; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<Eigen::Index>(i);
    Rng rng(derive_seed(c.seed, {0x6570u, static_cast<std::uint64_t>(epoch)}));
    rng.shuffle(perm);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      const auto m = static_cast<Eigen::Index>(stop - start);
      Eigen::MatrixXd xb(m, x.cols());
      Eigen::VectorXd yb(m);
      for (Eigen::Index r = 0; r < m; ++r) {
        xb.row(r) = x.row(perm[start + static_cast<std::size_t>(r)]);
        yb(r) = ys(perm[start + static_cast<std::size_t>(r)]);
      }
      const auto [loss, g] = mlp_loss_and_gradient(p, xb, yb, c.alpha);
      (void)loss;
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      const double lr = c.learning_rate * std::sqrt(c2) / c1;
      for (std::size_t l = 0; l < p.weights.size(); ++l) {
        mw[l] = beta1 * mw[l] + (1.0 - beta1) * g.weights[l];
        vw[l] = beta2 * vw[l] + (1.0 - beta2) * g.weights[l].cwiseAbs2();
        p.weights[l].array() -= lr * mw[l].array() / (vw[l].array().sqrt() + eps);
        mb[l] = beta1 * mb[l] + (1.0 - beta1) * g.biases[l];
        vb[l] = beta2 * vb[l] + (1.0 - beta2) * g.biases[l].cwiseAbs2();
        p.biases[l].array() -= lr * mb[l].array() / (vb[l].array().sqrt() + eps);
      }
    }
  }
  return p;
}

}  // namespace detail

}  // namespace mamprop
