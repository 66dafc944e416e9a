#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <fstream>

#include "mamprop/error.hpp"
#include "mamprop/learners.hpp"
#include "mamprop/rng.hpp"
#include "support.hpp"

using namespace mamprop;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Eigen::VectorXd linear_target(const Eigen::MatrixXd& x, std::uint64_t seed, double noise = 0.1) {
  Rng rng(seed);
  Eigen::VectorXd w(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) w(j) = rng.uniform(-2, 2);
  Eigen::VectorXd y = x * w;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += 3.0 + noise * rng.normal();
  return y;
}

// Relative error of the analytic gradient against central differences, over every parameter.
double mlp_gradient_error(const MlpParams& p, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          double alpha) {
  const auto [loss, grad] = mlp_loss_and_gradient(p, x, y, alpha);
  (void)loss;
  const double h = 1e-6;
  double worst = 0.0;
  auto check = [&](double analytic, auto&& bump) {
    MlpParams plus = p, minus = p;
    bump(plus, h);
    bump(minus, -h);
    const double numeric = (mlp_loss_and_gradient(plus, x, y, alpha).first -
                            mlp_loss_and_gradient(minus, x, y, alpha).first) / (2 * h);
    const double err = std::abs(analytic - numeric) / std::max(1e-7, std::abs(analytic) + std::abs(numeric));
    worst = std::max(worst, err);
  };
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < p.weights[l].rows(); ++i)
      for (Eigen::Index j = 0; j < p.weights[l].cols(); ++j)
        check(grad.weights[l](i, j), [&](MlpParams& q, double d) { q.weights[l](i, j) += d; });
    for (Eigen::Index i = 0; i < p.biases[l].size(); ++i)
      check(grad.biases[l](i), [&](MlpParams& q, double d) { q.biases[l](i) += d; });
  }
  return worst;
}

}  // namespace

TEST_CASE("mlp: analytic gradient matches central differences") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(derive_seed(99, {s}));
    const int inputs = 2 + static_cast<int>(rng.below(4));
    std::vector<int> widths = {inputs};
    const int hidden = 1 + static_cast<int>(rng.below(3));
    for (int h = 0; h < hidden; ++h) widths.push_back(2 + static_cast<int>(rng.below(5)));
    widths.push_back(1);
    const auto p = mlp_init(widths, derive_seed(7, {s}));
    const auto x = random_matrix(12, inputs, derive_seed(8, {s}));
    const Eigen::VectorXd y = random_matrix(12, 1, derive_seed(9, {s})).col(0);
    CHECK(mlp_gradient_error(p, x, y, 1e-3) < 1e-4);
  }
}

TEST_CASE("mlp: training reduces error and is seed deterministic") {
  const auto x = random_matrix(120, 3, 1);
  const Eigen::VectorXd y = (x.col(0).array().square() + x.col(1).array()).matrix();
  MlpConfig cfg;
  cfg.layer_sizes = {16, 8};
  cfg.epochs = 150;
  cfg.learning_rate = 1e-2;
  cfg.seed = 4;
  const auto a = fit(cfg, x, y);
  const auto b = fit(cfg, x, y);
  const auto pa = predict_matrix(a, x);
  CHECK((pa - predict_matrix(b, x)).cwiseAbs().maxCoeff() == 0.0);
  const double mse = (pa - y).squaredNorm() / 120.0;
  const double var = (y.array() - y.mean()).square().mean();
  CHECK(mse < 0.2 * var);
}

TEST_CASE("ridge: lambda 0 equals the normal equations") {
  const auto x = random_matrix(60, 5, 2);
  const auto y = linear_target(x, 3);
  const auto m = fit(RidgeConfig{0.0}, x, y);
  Eigen::MatrixXd a(60, 6);
  a << Eigen::VectorXd::Ones(60), x;
  const Eigen::VectorXd beta = (a.transpose() * a).ldlt().solve(a.transpose() * y);
  const auto& lp = std::get<LinearParams>(m.params);
  CHECK(std::abs(lp.intercept - beta(0)) < 1e-8);
  for (int j = 0; j < 5; ++j) CHECK(std::abs(lp.weights(j) - beta(j + 1)) < 1e-8);
}

TEST_CASE("ridge: intercept is not penalized") {
  Eigen::MatrixXd x = random_matrix(40, 2, 5);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(40, 100.0);
  const auto m = fit(RidgeConfig{1e6}, x, y);
  CHECK(std::get<LinearParams>(m.params).intercept == doctest::Approx(100.0));
}

TEST_CASE("lasso: lambda at lambda_max zeroes every coefficient") {
  const auto x = random_matrix(50, 4, 6);
  const auto y = linear_target(x, 7);
  // Objective (1/2n)||y - b - Xw||^2 + lambda ||w||_1 on centered columns.
  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double lambda_max = (xc.transpose() * yc).cwiseAbs().maxCoeff() / 50.0;
  for (double factor : {1.0, 2.0}) {
    LassoConfig cfg;
    cfg.lambda = lambda_max * factor;
    const auto m = fit(cfg, x, y);
    const auto& lp = std::get<LinearParams>(m.params);
    CHECK(lp.weights.cwiseAbs().maxCoeff() == 0.0);
    CHECK(lp.intercept == doctest::Approx(y.mean()));
  }
  LassoConfig below;
  below.lambda = lambda_max * 0.9;
  CHECK(std::get<LinearParams>(fit(below, x, y).params).weights.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("lasso: small lambda approaches least squares") {
  const auto x = random_matrix(80, 3, 8);
  const auto y = linear_target(x, 9);
  LassoConfig cfg;
  cfg.lambda = 1e-9;
  cfg.tol = 1e-12;
  cfg.max_iter = 100000;
  const auto lasso = fit(cfg, x, y);
  const auto ols = fit(RidgeConfig{0.0}, x, y);
  CHECK((std::get<LinearParams>(lasso.params).weights - std::get<LinearParams>(ols.params).weights)
            .cwiseAbs()
            .maxCoeff() < 1e-6);
}

TEST_CASE("gpr: noise-free interpolation and non-negative variance") {
  const auto x = random_matrix(40, 3, 10);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) y(i) = std::sin(x(i, 0)) + x(i, 1) * x(i, 2);
  GprConfig cfg;
  cfg.noise_var = 1e-10;
  cfg.length_scale = 1.5;
  const auto m = fit(cfg, x, y);
  CHECK((predict_matrix(m, x) - y).cwiseAbs().maxCoeff() < 1e-6);
  const auto q = random_matrix(200, 3, 11) * 3.0;
  const auto [mean, var] = gpr_predict(m, q);
  CHECK(var.minCoeff() >= -1e-9);
  CHECK(mean.allFinite());
}

TEST_CASE("gpr: duplicated rows survive via jitter") {
  Eigen::MatrixXd x(4, 1);
  x << 0, 0, 1, 2;
  Eigen::VectorXd y(4);
  y << 1, 1, 2, 3;
  GprConfig cfg;
  cfg.noise_var = 1e-12;
  const auto m = fit(cfg, x, y);
  CHECK(std::get<GprParams>(m.params).jitter >= 0.0);
  CHECK(predict_matrix(m, x)(2) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("svr: KKT conditions at convergence") {
  const auto x = random_matrix(60, 2, 12);
  const auto y = linear_target(x, 13, 0.3);
  for (KernelType k : {KernelType::linear, KernelType::rbf, KernelType::poly}) {
    SvrConfig cfg;
    cfg.c = 10.0;
    cfg.epsilon = 0.2;
    cfg.kernel.type = k;
    cfg.kernel.degree = 2;
    cfg.tol = 1e-4;
    const auto m = fit(cfg, x, y);
    CHECK(m.converged);
    const auto& sp = std::get<SvrParams>(m.params);
    CHECK(sp.coef.cwiseAbs().maxCoeff() <= cfg.c + 1e-9);
    // Points strictly inside the tube carry no dual weight; the support set is what remains.
    const auto f = predict_matrix(m, x);
    const auto fs = predict_matrix(m, sp.support);
    for (Eigen::Index i = 0; i < sp.support.rows(); ++i) {
      Eigen::Index row = -1;
      for (Eigen::Index r = 0; r < x.rows(); ++r)
        if ((x.row(r) - sp.support.row(i)).norm() == 0.0) row = r;
      REQUIRE(row >= 0);
      CHECK(std::abs(y(row) - fs(i)) >= cfg.epsilon - 1e-2);
    }
    CHECK(f.allFinite());
  }
}

TEST_CASE("svr: default gamma and kernel matrix symmetry") {
  const auto x = random_matrix(20, 4, 14);
  const double var = (x.array() - x.mean()).square().mean();
  CHECK(resolve_gamma(x) == doctest::Approx(1.0 / (4.0 * var)));
  SvrKernel k;
  k.type = KernelType::sigmoid;
  k.gamma = 0.1;
  k.coef0 = 0.5;
  const auto kk = svr_kernel_matrix(k, x, x);
  CHECK((kk - kk.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("cart: one split separates a perfectly split target") {
  Eigen::MatrixXd x(6, 2);
  x << 0, 5, 1, 4, 2, 3, 3, 2, 4, 1, 5, 0;
  Eigen::VectorXd y(6);
  y << 1, 1, 1, 3, 3, 3;
  TreeConfig cfg;
  cfg.max_depth = 1;
  const auto m = fit(cfg, x, y);
  CHECK((predict_matrix(m, x) - y).cwiseAbs().maxCoeff() == 0.0);
  const auto& t = std::get<TreeParams>(m.params).tree;
  CHECK(t.depth() == 1);
  CHECK(t.nodes[0].feature == 0);  // ties go to the lowest feature index
}

TEST_CASE("tree semantics: hand-built stump") {
  Tree t;
  t.nodes.resize(3);
  t.nodes[0] = {0, 2.0, 1, 2, 0.0, 0.0, 2.0};
  t.nodes[1].value = 1.0;
  t.nodes[2].value = 3.0;
  Eigen::VectorXd a(1), b(1);
  a << 0.0;
  b << 5.0;
  CHECK(t.predict(a) == 1.0);
  CHECK(t.predict(b) == 3.0);

  TrainedModel forest;
  forest.config = ForestConfig{};
  ForestParams fp;
  Tree two, four;
  two.nodes.resize(1);
  two.nodes[0].value = 2.0;
  four.nodes.resize(1);
  four.nodes[0].value = 4.0;
  fp.trees = {two, four};
  forest.params = fp;
  forest.n_features = 1;
  CHECK(predict_matrix(forest, Eigen::MatrixXd::Zero(1, 1))(0) == 3.0);
}

TEST_CASE("forest: constant target, determinism, tree-order invariance") {
  const auto x = random_matrix(50, 3, 15);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(50, 7.25);
  ForestConfig cfg;
  cfg.n_estimators = 20;
  cfg.seed = 3;
  CHECK((predict_matrix(fit(cfg, x, c), x).array() == 7.25).all());

  const auto y = linear_target(x, 16);
  const auto m = fit(cfg, x, y);
  const auto again = fit(cfg, x, y);
  CHECK((predict_matrix(m, x) - predict_matrix(again, x)).cwiseAbs().maxCoeff() == 0.0);
  TrainedModel reversed = m;
  auto& trees = std::get<ForestParams>(reversed.params).trees;
  std::reverse(trees.begin(), trees.end());
  CHECK((predict_matrix(m, x) - predict_matrix(reversed, x)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("boosting: empty ensemble predicts the mean, loss never increases") {
  const auto x = random_matrix(80, 3, 17);
  const auto y = linear_target(x, 18, 0.5);
  BoostingConfig zero;
  zero.n_estimators = 1;
  auto m = fit(zero, x, y);
  auto& bp = std::get<BoostingParams>(m.params);
  bp.trees.clear();
  CHECK(predict_matrix(m, x)(0) == doctest::Approx(y.mean()));

  for (double l2 : {0.0, 1.0}) {
    for (double lr : {0.1, 1.0}) {
      BoostingConfig cfg;
      cfg.n_estimators = 40;
      cfg.learning_rate = lr;
      cfg.l2_leaf = l2;
      cfg.l1_leaf = 0.05;
      const auto g = fit(cfg, x, y);
      const auto& loss = std::get<BoostingParams>(g.params).train_loss;
      // stops early once a stage cannot split any more
      REQUIRE(loss.size() >= 2);
      REQUIRE(loss.size() <= 41);
      for (std::size_t i = 1; i < loss.size(); ++i) CHECK(loss[i] <= loss[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("config validation") {
  ForestConfig f;
  f.n_estimators = 0;
  CHECK_THROWS_AS(validate_config(f), ValidationError);
  GprConfig g;
  g.noise_var = 0.0;
  CHECK_THROWS_AS(validate_config(g), ValidationError);
  CHECK_THROWS_AS(default_config("no-such-learner"), ValidationError);
  for (const char* name : {"mean", "ridge", "lasso", "tree", "rf", "gb", "xgb", "gpr", "mlp", "svr"}) {
    const auto cfg = default_config(name);
    CHECK_NOTHROW(validate_config(cfg));
    const auto back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
  }
  Eigen::MatrixXd bad(2, 1);
  bad << 1.0, std::nan("");
  CHECK_THROWS_AS(fit(RidgeConfig{}, bad, Eigen::VectorXd::Ones(2)), ValidationError);
  CHECK_THROWS_AS(fit(RidgeConfig{}, Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1)),
                  ValidationError);
}

TEST_CASE("serialization: round trip, corruption, future versions, fingerprints") {
  const auto x = random_matrix(40, 3, 19);
  const auto y = linear_target(x, 20);
  testing::TempDir dir("learners");
  MlpConfig mlp;
  mlp.layer_sizes = {5};
  mlp.epochs = 5;
  SvrConfig svr;
  svr.kernel.type = KernelType::poly;
  const std::vector<LearnerConfig> configs = {MeanConfig{}, RidgeConfig{0.5}, LassoConfig{}, TreeConfig{},
                                              ForestConfig{10}, BoostingConfig{}, GprConfig{}, mlp, svr};
  for (const auto& cfg : configs) {
    const auto m = fit(cfg, x, y);
    const auto path = dir.path / (learner_name(cfg) + ".json");
    save_model(m, path);
    const auto back = load_model(path);
    CHECK_MESSAGE((predict_matrix(m, x) - predict_matrix(back, x)).cwiseAbs().maxCoeff() == 0.0,
                  learner_name(cfg));
  }

  const auto m = fit(ForestConfig{5}, x, y);
  auto j = model_to_json(m);
  j["format_version"] = 9999;
  CHECK_THROWS_AS(model_from_json(j), SchemaError);

  const auto path = dir.path / "truncated.json";
  save_model(m, path);
  std::string text;
  {
    std::ifstream in(path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  {
    std::ofstream out(path, std::ios::trunc);
    out << text.substr(0, text.size() / 2);
  }
  CHECK_THROWS_AS(load_model(path), SchemaError);

  FeatureMatrix fx;
  fx.values = x;
  fx.schema = FeatureSchema({{ColumnOrigin::numeric, "a", "a", "", 1},
                             {ColumnOrigin::numeric, "b", "b", "", 1},
                             {ColumnOrigin::numeric, "c", "c", "", 1}});
  const auto fm = fit(RidgeConfig{}, fx, y);
  CHECK_NOTHROW(predict(fm, fx));
  FeatureMatrix other = fx;
  other.schema = FeatureSchema({{ColumnOrigin::numeric, "a", "a", "", 1},
                                {ColumnOrigin::numeric, "b", "b", "", 1},
                                {ColumnOrigin::numeric, "z", "z", "", 1}});
  CHECK_THROWS_AS(predict(fm, other), SchemaError);
}
