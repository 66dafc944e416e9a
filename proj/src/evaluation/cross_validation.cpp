#include <algorithm>
#include <cmath>
#include <numeric>

#include "mamprop/csv.hpp"
#include "mamprop/error.hpp"
#include "mamprop/evaluation.hpp"
#include "mamprop/io.hpp"
#include "mamprop/parallel.hpp"
#include "mamprop/rng.hpp"

namespace mamprop {

namespace {

struct FoldScore {
  double r2 = 0.0;
  double mae = 0.0;
  bool converged = true;
  Eigen::VectorXd prediction;
};

FoldScore run_fold(const LearnerConfig& cfg, const FeatureMatrix& x, const Eigen::VectorXd& y,
                   const Fold& fold, std::uint64_t seed, bool standardize_onehot) {
  const FoldData data = prepare_fold(x, fold, standardize_onehot);
  Eigen::VectorXd ytr(static_cast<Eigen::Index>(fold.train.size()));
  Eigen::VectorXd yte(static_cast<Eigen::Index>(fold.test.size()));
  for (std::size_t i = 0; i < fold.train.size(); ++i) ytr(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(fold.train[i]));
  for (std::size_t i = 0; i < fold.test.size(); ++i) yte(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(fold.test[i]));
  const TrainedModel m = fit(with_seed(cfg, seed), data.train, ytr);
  FoldScore s;
  s.prediction = predict(m, data.test);
  s.r2 = r2(yte, s.prediction);
  s.mae = mae(yte, s.prediction);
  s.converged = m.converged;
  return s;
}

template <class F>
auto annotate(std::size_t fold, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), "fold " + std::to_string(fold) + ": " + e.what());
  }
}

}  // namespace

std::vector<Fold> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k-fold needs k >= 2");
  if (n < k) {
    throw ValidationError("cannot split " + std::to_string(n) + " records into " +
                          std::to_string(k) + " folds");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(perm);
  std::vector<Fold> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    std::vector<char> in_test(n, 0);
    folds[f].test.assign(perm.begin() + static_cast<std::ptrdiff_t>(start),
                         perm.begin() + static_cast<std::ptrdiff_t>(start + size));
    std::sort(folds[f].test.begin(), folds[f].test.end());
    for (std::size_t i : folds[f].test) in_test[i] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_test[i]) folds[f].train.push_back(i);
    }
    start += size;
  }
  return folds;
}

std::uint64_t fold_hash(const std::vector<Fold>& folds) {
  std::string text;
  for (const auto& f : folds) {
    for (std::size_t i : f.test) text += std::to_string(i) + ",";
    text += ";";
  }
  return fnv1a64(text);
}

FoldData prepare_fold(const FeatureMatrix& x, const Fold& fold, bool standardize_onehot) {
  FoldData d;
  const FeatureMatrix train = x.select_rows(fold.train);
  d.standardizer = fit_standardizer(train, standardize_onehot);
  d.train = apply_standardizer(d.standardizer, train);
  d.test = apply_standardizer(d.standardizer, x.select_rows(fold.test));
  return d;
}

CvReport cross_validate_matrix(const LearnerConfig& cfg, const FeatureMatrix& x,
                               const Eigen::VectorXd& y, const std::vector<Fold>& folds,
                               std::uint64_t seed, bool standardize_onehot) {
  std::vector<FoldScore> scores(folds.size());
  parallel_for(folds.size(), [&](std::size_t f) {
    scores[f] = annotate(f, [&] {
      return run_fold(cfg, x, y, folds[f], derive_seed(seed, {f}), standardize_onehot);
    });
  });
  CvReport rep;
  rep.config = cfg;
  rep.k = folds.size();
  rep.seed = seed;
  rep.n_records = static_cast<std::size_t>(x.rows());
  rep.n_features = static_cast<std::size_t>(x.cols());
  rep.folds_hash = fold_hash(folds);
  rep.oof_prediction.assign(rep.n_records, 0.0);
  rep.truth.assign(y.data(), y.data() + y.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    rep.fold_r2.push_back(scores[f].r2);
    rep.fold_mae.push_back(scores[f].mae);
    rep.converged = rep.converged && scores[f].converged;
    for (std::size_t i = 0; i < folds[f].test.size(); ++i) {
      rep.oof_prediction[folds[f].test[i]] = scores[f].prediction(static_cast<Eigen::Index>(i));
    }
  }
  rep.mean_r2 = mean_of(rep.fold_r2);
  rep.std_r2 = population_std(rep.fold_r2);
  rep.mean_mae = mean_of(rep.fold_mae);
  rep.std_mae = population_std(rep.fold_mae);
  return rep;
}

std::string featurization_tag(const FeaturizationPlan& plan) {
  std::string tag = plan.dropped_groups.empty() ? "baseline" : "selected";
  if (plan.kind != Featurization::baseline) tag += "+" + std::string(to_string(plan.kind));
  return tag;
}

CvReport cross_validate(const LearnerConfig& cfg, const Dataset& ds, const FeaturizationPlan& plan,
                        LabelKind label, std::size_t k, std::uint64_t seed,
                        const ElementTable* elements) {
  const Dataset sel = select_complete(ds, required_fields(plan), label);
  if (sel.size() < k) {
    throw ValidationError("only " + std::to_string(sel.size()) + " complete records for " +
                          std::string(to_string(label)) + ", need at least " + std::to_string(k));
  }
  const FeatureMatrix x = featurize(sel, plan, elements);
  const Eigen::VectorXd y = label_vector(sel, label);
  const auto folds = kfold_indices(sel.size(), k, seed);
  CvReport rep = cross_validate_matrix(cfg, x, y, folds, seed, plan.standardize_onehot);
  rep.task = std::string(to_string(label));
  rep.featurization = featurization_tag(plan);
  return rep;
}

nlohmann::json CvReport::to_json() const {
  return {{"task", task},
          {"featurization", featurization},
          {"learner", config_to_json(config)},
          {"k", k},
          {"seed", seed},
          {"n_records", n_records},
          {"n_features", n_features},
          {"folds_hash", hex64(folds_hash)},
          {"fold_r2", fold_r2},
          {"fold_mae", fold_mae},
          {"mean_r2", mean_r2},
          {"std_r2", std_r2},
          {"mean_mae", mean_mae},
          {"std_mae", std_mae},
          {"converged", converged}};
}

std::string CvReport::folds_csv() const {
  std::string out = csv_line({"fold", "r2", "mae"});
  for (std::size_t f = 0; f < fold_r2.size(); ++f) {
    out += csv_line({std::to_string(f), format_number(fold_r2[f]), format_number(fold_mae[f])});
  }
  out += csv_line({"mean", format_number(mean_r2), format_number(mean_mae)});
  out += csv_line({"std", format_number(std_r2), format_number(std_mae)});
  return out;
}

std::string CvReport::predictions_csv() const {
  std::string out = csv_line({"record", "truth", "prediction"});
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out += csv_line({std::to_string(i), format_number(truth[i]), format_number(oof_prediction[i])});
  }
  return out;
}

LearningCurve learning_curve(const LearnerConfig& cfg, const FeatureMatrix& x,
                             const Eigen::VectorXd& y, const std::vector<double>& fractions,
                             std::size_t repeats, std::size_t k, std::uint64_t seed,
                             bool standardize_onehot) {
  if (fractions.empty()) throw ValidationError("learning curve needs at least one fraction");
  if (repeats < 1) throw ValidationError("learning curve needs repeats >= 1");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ValidationError("fractions must lie in (0, 1]");
  }
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::vector<Fold>> fold_sets;
  for (std::size_t r = 0; r < repeats; ++r) {
    fold_sets.push_back(kfold_indices(n, k, r == 0 ? seed : derive_seed(seed, {0x726570u, r})));
  }

  struct Job {
    std::size_t point, repeat, fold;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < fractions.size(); ++p) {
    for (std::size_t r = 0; r < repeats; ++r) {
      for (std::size_t f = 0; f < k; ++f) jobs.push_back({p, r, f});
    }
  }
  std::vector<FoldScore> scores(jobs.size());
  std::vector<std::size_t> train_rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& job = jobs[j];
    const Fold& full = fold_sets[job.repeat][job.fold];
    Fold fold = full;
    const double frac = fractions[job.point];
    if (frac < 1.0) {
      std::vector<std::size_t> perm = full.train;
      Rng rng(derive_seed(seed, {0x6c63u, job.repeat, job.fold}));
      rng.shuffle(perm);
      const auto keep = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(perm.size()) - 1e-9));
      if (keep < 2) {
        throw ValidationError("fraction " + format_number(frac) + " leaves fewer than 2 training rows");
      }
      perm.resize(keep);
      std::sort(perm.begin(), perm.end());
      fold.train = perm;
    }
    train_rows[j] = fold.train.size();
    const std::uint64_t fold_seed =
        job.repeat == 0 ? derive_seed(seed, {job.fold})
                        : derive_seed(derive_seed(seed, {0x726570u, job.repeat}), {job.fold});
    scores[j] = annotate(job.fold, [&] { return run_fold(cfg, x, y, fold, fold_seed, standardize_onehot); });
  });

  LearningCurve curve;
  for (std::size_t p = 0; p < fractions.size(); ++p) {
    std::vector<double> maes, r2s;
    double rows = 0.0;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].point != p) continue;
      maes.push_back(scores[j].mae);
      r2s.push_back(scores[j].r2);
      rows += static_cast<double>(train_rows[j]);
    }
    CurvePoint pt;
    pt.fraction = fractions[p];
    pt.evaluations = maes.size();
    pt.mean_train_rows = rows / static_cast<double>(maes.size());
    pt.mean_mae = mean_of(maes);
    pt.std_mae = population_std(maes);
    pt.mean_r2 = mean_of(r2s);
    pt.std_r2 = population_std(r2s);
    curve.points.push_back(pt);
  }
  return curve;
}

nlohmann::json LearningCurve::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"fraction", p.fraction},
                   {"evaluations", p.evaluations},
                   {"mean_train_rows", p.mean_train_rows},
                   {"mean_mae", p.mean_mae},
                   {"std_mae", p.std_mae},
                   {"mean_r2", p.mean_r2},
                   {"std_r2", p.std_r2}});
  }
  return {{"task", task}, {"points", pts}};
}

std::string LearningCurve::to_csv() const {
  std::string out = csv_line({"fraction", "mean_train_rows", "mean_mae", "std_mae", "mean_r2", "std_r2"});
  for (const auto& p : points) {
    out += csv_line({format_number(p.fraction), format_number(p.mean_train_rows),
                     format_number(p.mean_mae), format_number(p.std_mae), format_number(p.mean_r2),
                     format_number(p.std_r2)});
  }
  return out;
}

}  // namespace mamprop
