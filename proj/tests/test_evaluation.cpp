#include <doctest.h>

#include <algorithm>
#include <set>

#include "mamprop/error.hpp"
#include "mamprop/evaluation.hpp"
#include "mamprop/rng.hpp"
#include "mamprop/synth.hpp"
#include "support.hpp"

using namespace mamprop;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

FeatureMatrix numeric_matrix(const Eigen::MatrixXd& values) {
  std::vector<FeatureColumn> cols;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    const std::string n = "x" + std::to_string(j);
    cols.push_back({ColumnOrigin::numeric, n, n, "", 1});
  }
  FeatureMatrix x;
  x.values = values;
  x.schema = FeatureSchema(cols);
  for (Eigen::Index i = 0; i < values.rows(); ++i) x.row_ids.push_back(static_cast<std::size_t>(i));
  return x;
}

}  // namespace

TEST_CASE("r2 and mae on hand-computed examples") {
  const auto y = vec({1, 2, 3});
  CHECK(r2(y, y) == 1.0);
  CHECK(r2(y, vec({2, 2, 2})) == 0.0);
  CHECK(r2(y, vec({1, 2, 5})) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(mae(y, y) == 0.0);
  CHECK(mae(vec({0, 0}), vec({1, -1})) == 1.0);
  CHECK(mae(vec({100}), vec({153.55})) == doctest::Approx(53.55));
  CHECK_THROWS_AS(r2(vec({4, 4, 4}), vec({1, 2, 3})), ValidationError);
  CHECK_THROWS_AS(r2(vec({1, 2}), vec({1, 2, 3})), ValidationError);
  CHECK_THROWS_AS(mae(vec({1, 2}), vec({1})), ValidationError);
}

TEST_CASE("r2 never exceeds one") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd y(10), p(10);
    for (int i = 0; i < 10; ++i) {
      y(i) = rng.normal();
      p(i) = rng.normal();
    }
    CHECK(r2(y, p) <= 1.0);
    CHECK(r2(y, Eigen::VectorXd::Constant(10, y.mean())) == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("kfold: sizes, disjointness, coverage, determinism") {
  const auto folds = kfold_indices(1600, 5, 42);
  REQUIRE(folds.size() == 5);
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    CHECK(f.test.size() == 320);
    CHECK(f.train.size() == 1280);
    for (auto i : f.test) CHECK(seen.insert(i).second);
  }
  CHECK(seen.size() == 1600);

  const auto seven = kfold_indices(7, 5, 1);
  std::vector<std::size_t> sizes;
  for (const auto& f : seven) sizes.push_back(f.test.size());
  CHECK(sizes == std::vector<std::size_t>{2, 2, 1, 1, 1});
  CHECK(fold_hash(kfold_indices(100, 5, 3)) == fold_hash(kfold_indices(100, 5, 3)));
  CHECK(fold_hash(kfold_indices(100, 5, 3)) != fold_hash(kfold_indices(100, 5, 4)));
  CHECK_THROWS_AS(kfold_indices(3, 5, 1), ValidationError);

  for (std::size_t n = 2; n < 40; ++n) {
    for (std::size_t k = 2; k <= n; k += 3) {
      std::vector<int> hits(n, 0);
      for (const auto& f : kfold_indices(n, k, n * 31 + k)) {
        CHECK(f.train.size() + f.test.size() == n);
        for (auto i : f.test) hits[i]++;
        for (auto i : f.train) CHECK_FALSE(std::binary_search(f.test.begin(), f.test.end(), i));
      }
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
  }
}

TEST_CASE("standardizer statistics come from training rows only") {
  Rng rng(3);
  Eigen::MatrixXd v(50, 2);
  for (int i = 0; i < 50; ++i) {
    v(i, 0) = rng.normal();
    v(i, 1) = rng.normal();
  }
  const auto x = numeric_matrix(v);
  const auto folds = kfold_indices(50, 5, 9);
  const auto before = prepare_fold(x, folds[0], false);
  FeatureMatrix planted = x;
  planted.values(static_cast<Eigen::Index>(folds[0].test[0]), 0) = 1e9;
  const auto after = prepare_fold(planted, folds[0], false);
  CHECK(before.standardizer.means == after.standardizer.means);
  CHECK(before.standardizer.stds == after.standardizer.stds);
}

TEST_CASE("cross validation: null model, determinism, recomputable aggregates") {
  Rng rng(11);
  Eigen::MatrixXd v(200, 3);
  Eigen::VectorXd y(200);
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 3; ++j) v(i, j) = rng.normal();
    y(i) = rng.normal();
  }
  const auto x = numeric_matrix(v);
  const auto folds = kfold_indices(200, 5, 1);
  const auto null = cross_validate_matrix(MeanConfig{}, x, y, folds, 1);
  CHECK(std::abs(null.mean_r2) < 0.1);
  CHECK(null.mean_r2 <= 0.0);

  ForestConfig rf;
  rf.n_estimators = 10;
  const auto a = cross_validate_matrix(rf, x, y, folds, 5);
  const auto b = cross_validate_matrix(rf, x, y, folds, 5);
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(a.fold_r2.size() == 5);
  CHECK(a.mean_r2 == doctest::Approx(mean_of(a.fold_r2)));
  CHECK(a.std_r2 == doctest::Approx(population_std(a.fold_r2)));
  CHECK(a.mean_mae == doctest::Approx(mean_of(a.fold_mae)));
}

TEST_CASE("cross validation on the bundled sample") {
  const auto& ds = testing::bundled_records();
  ForestConfig rf;
  rf.n_estimators = 30;
  const auto report = cross_validate(rf, ds, FeaturizationPlan{}, LabelKind::uts, 5, 7);
  CHECK(report.n_records > 1000);
  CHECK(report.fold_r2.size() == 5);
  CHECK(report.mean_r2 > 0.8);
  CHECK(report.featurization == "baseline");
}

TEST_CASE("learning curve: identity case and downward trend") {
  auto reg = testing::bundled_registry();
  double gain = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    PowerLawBenchmarkOptions o;
    o.n_records = 250;
    o.seed = s;
    const auto ds = generate_powerlaw_benchmark(reg, o);
    const auto x = featurize(ds, {}, nullptr);
    const auto y = label_vector(ds, LabelKind::ys);
    ForestConfig rf;
    rf.n_estimators = 20;
    const auto curve = learning_curve(rf, x, y, {0.2, 1.0}, 1, 5, s);
    REQUIRE(curve.points.size() == 2);
    gain += curve.points[0].mean_mae - curve.points[1].mean_mae;
    if (s == 0) {
      const auto cv = cross_validate_matrix(rf, x, y, kfold_indices(250, 5, s), s);
      CHECK(curve.points[1].mean_mae == doctest::Approx(cv.mean_mae).epsilon(1e-12));
      CHECK(curve.points[1].mean_r2 == doctest::Approx(cv.mean_r2).epsilon(1e-12));
      const auto single = learning_curve(rf, x, y, {0.5}, 2, 5, s);
      CHECK(single.points.size() == 1);
      CHECK(single.points[0].evaluations == 10);
    }
  }
  CHECK(gain > 0.0);

  const auto x = numeric_matrix(Eigen::MatrixXd::Random(10, 2));
  CHECK_THROWS_AS(learning_curve(MeanConfig{}, x, Eigen::VectorXd::LinSpaced(10, 0, 1), {0.1}, 1, 5, 0),
                  ValidationError);
  CHECK_THROWS_AS(learning_curve(MeanConfig{}, x, Eigen::VectorXd::LinSpaced(10, 0, 1), {1.5}, 1, 5, 0),
                  ValidationError);
}

TEST_CASE("pearson: identities, signs and affine invariance") {
  CHECK(*pearson({1, 2, 3, 4}, {1, 2, 3, 4}) == doctest::Approx(1.0));
  CHECK(*pearson({1, 2, 3, 4}, {-1, -2, -3, -4}) == doctest::Approx(-1.0));
  CHECK_FALSE(pearson({1}, {2}).has_value());

  auto reg = testing::bundled_registry();
  std::string text = testing::kRecordHeader;
  Rng rng(21);
  std::vector<double> uts;
  for (int i = 0; i < 300; ++i) {
    const double u = 900 + 150 * rng.normal();
    const double ys = 0.9 * u + 30 * rng.normal();
    const double el = 60 - 0.05 * u + 2 * rng.normal();
    text += "IN718,PBF,L-PBF,M1,XY,as-built,,200,1000,30,80," + std::to_string(ys) + "," +
            std::to_string(u) + ",," + std::to_string(el) + ",,,,t\n";
  }
  const auto ds = parse_dataset(text, "c.csv", reg);
  const auto m = pearson_matrix(ds, {LabelKind::ys, LabelKind::uts, LabelKind::elongation, LabelKind::hv});
  CHECK(*m.values[0][1] > 0.8);
  CHECK(*m.values[1][2] < -0.3);
  CHECK(*m.values[0][0] == 1.0);
  CHECK_FALSE(m.values[0][3].has_value());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(*m.values[i][j] == *m.values[j][i]);
      CHECK(std::abs(*m.values[i][j]) <= 1.0);
    }

  Dataset scaled = ds;
  for (auto& r : scaled.records) *r.label(LabelKind::uts) = 3.0 * *r.label(LabelKind::uts) + 17.0;
  const auto m2 = pearson_matrix(scaled, {LabelKind::ys, LabelKind::uts, LabelKind::elongation});
  CHECK(*m2.values[0][1] == doctest::Approx(*m.values[0][1]).epsilon(1e-12));
  CHECK(*m2.values[1][2] == doctest::Approx(*m.values[1][2]).epsilon(1e-12));

  const auto only = pearson_matrix(testing::bundled_records(), {LabelKind::ys, LabelKind::uts},
                                   std::string("IN718"));
  CHECK(only.counts[0][1] > 2);
}
