#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mamprop/error.hpp"
#include "mamprop/hyperopt.hpp"
#include "mamprop/rng.hpp"

using namespace mamprop;

namespace {

double as_double(const ParamValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

SearchSpace log_space() {
  SearchSpace s;
  s.add("x", FloatLogUniform{1e-7, 1e-1});
  return s;
}

double log_objective(const ParamSet& p) {
  const double l = std::log10(as_double(p.at("x"))) + 4.0;
  return -l * l;
}

double best_log_distance(const TrialHistory& h) {
  return std::abs(std::log10(as_double(h.best_trial()->params.at("x"))) + 4.0);
}

void check_best_is_max(const TrialHistory& h) {
  double best = -1e300;
  for (const auto& t : h.trials)
    if (t.objective) best = std::max(best, *t.objective);
  REQUIRE(h.best_trial() != nullptr);
  CHECK(*h.best_trial()->objective == best);
}

}  // namespace

TEST_CASE("space validation") {
  SearchSpace s;
  CHECK_THROWS_AS(s.add("a", IntUniform{5, 5}), ValidationError);
  CHECK_THROWS_AS(s.add("b", Categorical{{}}), ValidationError);
  s.add("kernel", Categorical{{std::string("rbf"), std::string("poly")}});
  CHECK_THROWS_AS(s.add("kernel", FloatUniform{0, 1}), ValidationError);
  CHECK_THROWS_AS(s.add("degree", IntUniform{2, 4}, Condition{"missing", std::string("poly")}), ValidationError);
  CHECK_THROWS_AS(s.add("degree", IntUniform{2, 4}, Condition{"kernel", std::string("linear")}), ValidationError);
  CHECK_NOTHROW(s.add("degree", IntUniform{2, 4}, Condition{"kernel", std::string("poly")}));
}

TEST_CASE("grid search") {
  SearchSpace one;
  one.add("x", Categorical{{std::int64_t{1}, std::int64_t{2}, std::int64_t{3}}});
  const auto h = grid_search(one, [](const ParamSet& p) {
    const double x = as_double(p.at("x"));
    return -(x - 2) * (x - 2);
  }, 5);
  CHECK(h.trials.size() == 3);
  CHECK(as_double(h.best_trial()->params.at("x")) == 2.0);

  SearchSpace two;
  two.add("a", Categorical{{std::string("p"), std::string("q")}});
  two.add("b", Categorical{{std::int64_t{0}, std::int64_t{1}}});
  const auto pts = grid_points(two, 3);
  REQUIRE(pts.size() == 4);
  CHECK(std::get<std::string>(pts[0].at("a")) == "p");
  CHECK(std::get<std::int64_t>(pts[1].at("b")) == 1);
  CHECK(std::get<std::string>(pts[2].at("a")) == "q");
  CHECK(grid_points(two, 3) == pts);

  SearchSpace ints;
  ints.add("n", IntUniform{1, 3});
  CHECK(grid_points(ints, 10).size() == 3);
}

TEST_CASE("random search: count, determinism, log-uniform distribution") {
  const auto space = log_space();
  CHECK(random_search(space, log_objective, 1, 3).trials.size() == 1);
  const auto a = random_search(space, log_objective, 20, 5);
  const auto b = random_search(space, log_objective, 20, 5);
  for (std::size_t i = 0; i < 20; ++i) CHECK(a.trials[i].params == b.trials[i].params);
  check_best_is_max(a);

  Rng rng(77);
  std::vector<double> u;
  for (int i = 0; i < 10000; ++i) {
    const double x = as_double(sample_prior(space, rng).at("x"));
    REQUIRE(x >= 1e-7);
    REQUIRE(x <= 1e-1);
    u.push_back((std::log10(x) + 7.0) / 6.0);
  }
  std::sort(u.begin(), u.end());
  double d = 0.0;
  const double n = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - u[i], u[i] - static_cast<double>(i) / n));
  }
  CHECK(d < 1.628 / std::sqrt(n));  // Kolmogorov-Smirnov, alpha = 0.01
}

TEST_CASE("tpe: finds the log-domain optimum") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto h = tpe_search(log_space(), log_objective, 50, seed);
    CHECK(h.trials.size() == 50);
    check_best_is_max(h);
    if (best_log_distance(h) < 0.5) ++hits;
  }
  CHECK(hits >= 8);
}

TEST_CASE("tpe: boundary, ties, determinism, domains") {
  const auto h = tpe_search(log_space(), log_objective, 11, 1);
  CHECK(h.trials.size() == 11);
  CHECK_NOTHROW(tpe_search(log_space(), [](const ParamSet&) { return 1.0; }, 20, 2));
  const auto flat = tpe_search(log_space(), [](const ParamSet&) { return 1.0; }, 20, 2);
  CHECK(*flat.best == 0);

  SearchSpace svr;
  svr.add("C", IntUniform{1, 1000});
  svr.add("kernel", Categorical{{std::string("linear"), std::string("poly"), std::string("rbf")}});
  svr.add("degree", Categorical{{std::int64_t{2}, std::int64_t{3}, std::int64_t{4}}},
          Condition{"kernel", std::string("poly")});
  svr.add("gamma", FloatUniform{0.0, 1.0});
  auto obj = [](const ParamSet& p) {
    double v = -std::abs(as_double(p.at("C")) - 300.0) / 100.0;
    if (std::get<std::string>(p.at("kernel")) == "poly") v += 1.0 - std::abs(as_double(p.at("degree")) - 3.0);
    return v - as_double(p.at("gamma"));
  };
  const auto a = tpe_search(svr, obj, 40, 9);
  const auto b = tpe_search(svr, obj, 40, 9);
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].params == b.trials[i].params);
    CHECK(svr.contains(a.trials[i].params));
    const bool poly = std::get<std::string>(a.trials[i].params.at("kernel")) == "poly";
    CHECK(a.trials[i].params.count("degree") == (poly ? 1u : 0u));
    const double c = as_double(a.trials[i].params.at("C"));
    CHECK(c >= 1);
    CHECK(c <= 1000);
  }
  check_best_is_max(a);
}

TEST_CASE("failed trials are recorded and skipped") {
  int calls = 0;
  const auto h = tpe_search(log_space(), [&](const ParamSet& p) {
    if (++calls % 3 == 0) throw ConvergenceError("planted failure");
    return log_objective(p);
  }, 20, 4);
  CHECK(h.trials.size() == 20);
  std::size_t failed = 0;
  for (const auto& t : h.trials) {
    if (!t.objective) {
      ++failed;
      CHECK(t.message.find("planted") != std::string::npos);
    }
  }
  CHECK(failed > 0);
  check_best_is_max(h);
}

TEST_CASE("builtin spaces and reference optima") {
  const auto rf = builtin_space(LabelKind::ys, "rf");
  const auto& n = std::get<IntUniform>(rf.find("n_estimators")->domain);
  CHECK(n.lo == 1);
  CHECK(n.hi == 500);

  const auto svr = builtin_space(LabelKind::ys, "svr");
  CHECK(std::get<IntUniform>(svr.find("C")->domain).hi == 1000);
  CHECK(std::get<Categorical>(svr.find("kernel")->domain).levels.size() == 4);
  CHECK(svr.find("degree")->condition->parent == "kernel");

  const auto mlp = builtin_space(LabelKind::rz, "mlp");
  CHECK(std::get<Categorical>(mlp.find("neurons_1")->domain).levels.size() == 5);
  CHECK(std::get<FloatLogUniform>(mlp.find("alpha")->domain).lo == 1e-7);
  CHECK_THROWS_AS(builtin_space(LabelKind::ys, "gpr"), ValidationError);

  const auto ys_rf = reference_optimum(LabelKind::ys, "rf");
  REQUIRE(ys_rf);
  CHECK(std::get<std::int64_t>(ys_rf->at("n_estimators")) == 382);
  CHECK(rf.contains(*ys_rf));
  const auto ys_svr = *reference_optimum(LabelKind::ys, "svr");
  CHECK(std::get<std::int64_t>(ys_svr.at("C")) == 698);
  CHECK(std::get<std::string>(ys_svr.at("kernel")) == "poly");
  CHECK(std::get<std::int64_t>(ys_svr.at("degree")) == 2);
  const auto hrc = *reference_optimum(LabelKind::hrc, "svr");
  CHECK(std::get<std::int64_t>(hrc.at("C")) == 234);
  CHECK(std::get<std::int64_t>(hrc.at("degree")) == 3);

  const auto cfg = apply_params(family_config("svr"), ys_svr);
  const auto& s = std::get<SvrConfig>(cfg);
  CHECK(s.c == 698);
  CHECK(s.kernel.type == KernelType::poly);
  CHECK(s.kernel.degree == 2);
  CHECK_THROWS_AS(apply_params(family_config("rf"), ParamSet{{"C", std::int64_t{3}}}), ValidationError);
  CHECK(params_from_json(params_to_json(ys_svr)) == ys_svr);
}
