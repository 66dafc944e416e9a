#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "mamprop/csv.hpp"
#include "mamprop/eqdiscovery.hpp"
#include "mamprop/error.hpp"
#include "mamprop/evaluation.hpp"
#include "mamprop/explain.hpp"
#include "mamprop/features.hpp"
#include "mamprop/hyperopt.hpp"
#include "mamprop/io.hpp"
#include "mamprop/learners.hpp"
#include "mamprop/parallel.hpp"
#include "mamprop/rng.hpp"
#include "mamprop/synth.hpp"

namespace mamprop::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kFormatVersion = 1;

struct RunConfig {
  std::string command;
  std::string data_dir;
  std::string materials, elements, records, out = "out";
  std::string task = "ys";
  std::string featurization = "baseline";
  std::string model = "rf";
  std::string learner_config;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  bool standardize_onehot = false;
  bool paper_constraints = false;
  double t0 = 25.0;
  std::size_t k = 5;
  std::vector<std::string> drop;
  // tune
  std::size_t trials = 50;
  std::string method = "tpe";
  std::size_t resolution = 5;
  // importance / shap
  std::string kind = "drop-column";
  std::size_t instances = 100;
  std::size_t background = 100;
  std::optional<std::size_t> index;
  // discover
  std::string condition = "as_built";
  // learning curve
  std::vector<double> fractions = {0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t repeats = 5;
  // corr
  std::string material;
  std::vector<std::string> labels;
  // report
  std::vector<std::string> inputs;
  // synth
  std::string generator = "benchmark";
  std::size_t n = 0;
  std::size_t n_materials = 5;
  double noise = 0.01;

  unsigned jobs = 1;  // not part of the provenance: outputs must not depend on it

  json to_json() const {
    json j = {{"command", command},
              {"materials", materials},
              {"elements", elements},
              {"records", records},
              {"out", out},
              {"task", task},
              {"featurization", featurization},
              {"model", model},
              {"learner_config", learner_config},
              {"seed", seed.value_or(0)},
              {"strict", strict},
              {"standardize_onehot", standardize_onehot},
              {"paper_constraints", paper_constraints},
              {"t0", t0},
              {"k", k},
              {"drop", drop}};
    if (command == "tune") j.update({{"trials", trials}, {"method", method}, {"resolution", resolution}});
    if (command == "importance") j["kind"] = kind;
    if (command == "shap" || command == "importance") {
      j["instances"] = instances;
      j["background"] = background;
      j["index"] = index ? json(*index) : json(nullptr);
    }
    if (command == "discover") j["condition"] = condition;
    if (command == "learning-curve") j.update({{"fractions", fractions}, {"repeats", repeats}});
    if (command == "corr") j.update({{"material", material}, {"labels", labels}});
    if (command == "report") j["inputs"] = inputs;
    if (command == "synth")
      j.update({{"generator", generator}, {"n", n}, {"n_materials", n_materials}, {"noise", noise}});
    return j;
  }
};

struct Context {
  RunConfig cfg;
  std::uint64_t seed = 0;
  std::uint64_t input_hash = 0xcbf29ce484222325ULL;
  std::vector<std::string> hashed;

  void hash_file(const std::string& path) {
    const std::string text = read_text_file(path);
    input_hash = fnv1a64(path.substr(path.find_last_of('/') + 1), input_hash);
    input_hash = fnv1a64(text, input_hash);
    hashed.push_back(path);
  }

  json envelope(json result) const {
    json j;
    j["format_version"] = kFormatVersion;
    j["command"] = cfg.command;
    j["run_config"] = cfg.to_json();
    j["input_hash"] = hex64(input_hash);
    j["result"] = std::move(result);
    return j;
  }

  fs::path out(const std::string& name) const { return fs::path(cfg.out) / name; }

  void write_json(const std::string& name, const json& result) const {
    write_file_atomic(out(name), envelope(result).dump(2) + "\n");
  }
  void write_text(const std::string& name, const std::string& text) const { write_file_atomic(out(name), text); }
};

LabelKind parse_task(const std::string& s) {
  const auto l = parse_label(s);
  if (!l) throw ValidationError("unknown task '" + s + "'");
  return *l;
}

FeaturizationPlan make_plan(const RunConfig& c) {
  FeaturizationPlan plan;
  const auto f = parse_featurization(c.featurization);
  if (!f) throw ValidationError("unknown featurization '" + c.featurization + "'");
  plan.kind = *f;
  plan.standardize_onehot = c.standardize_onehot;
  plan.dropped_groups = c.drop;
  return plan;
}

std::shared_ptr<const MaterialRegistry> load_registry(Context& ctx) {
  LoadOptions opts;
  opts.strict = ctx.cfg.strict;
  ctx.hash_file(ctx.cfg.materials);
  return std::make_shared<const MaterialRegistry>(load_materials(ctx.cfg.materials, opts));
}

Dataset load_records(Context& ctx, std::shared_ptr<const MaterialRegistry> registry) {
  LoadOptions opts;
  opts.strict = ctx.cfg.strict;
  ctx.hash_file(ctx.cfg.records);
  return load_dataset(ctx.cfg.records, std::move(registry), opts);
}

std::optional<ElementTable> load_elements_if(Context& ctx, const MaterialRegistry& registry, bool needed) {
  if (!needed) return std::nullopt;
  ctx.hash_file(ctx.cfg.elements);
  return load_elements(ctx.cfg.elements, &registry);
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

LearnerConfig learner_config(Context& ctx) {
  if (ctx.cfg.learner_config.empty()) return default_config(ctx.cfg.model);
  ctx.hash_file(ctx.cfg.learner_config);
  json j = read_json_file(ctx.cfg.learner_config);
  // Accept a bare config, tune's best.json, or its report envelope.
  if (j.contains("result")) j = j["result"];
  if (j.contains("best_config")) j = j["best_config"];
  if (j.contains("config") && j["config"].is_object()) j = j["config"];
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw SchemaError(ctx.cfg.learner_config + ": " + e.what());
  }
}

struct TaskData {
  Dataset ds;
  FeatureMatrix x;
  Eigen::VectorXd y;
  FeaturizationPlan plan;
  LabelKind label = LabelKind::ys;
  std::optional<ElementTable> elements;
};

TaskData task_data(Context& ctx) {
  TaskData t;
  t.plan = make_plan(ctx.cfg);
  t.label = parse_task(ctx.cfg.task);
  auto registry = load_registry(ctx);
  t.elements = load_elements_if(ctx, *registry, t.plan.kind == Featurization::elemental);
  const Dataset all = load_records(ctx, registry);
  t.ds = select_complete(all, required_fields(t.plan), t.label);
  if (t.ds.size() < ctx.cfg.k)
    throw ValidationError("only " + std::to_string(t.ds.size()) + " complete records for task " + ctx.cfg.task);
  t.x = featurize(t.ds, t.plan, t.elements ? &*t.elements : nullptr);
  t.y = label_vector(t.ds, t.label);
  return t;
}

std::string model_title(const std::string& name) {
  static const std::map<std::string, std::string> titles = {
      {"rf", "Random forests"},     {"gb", "Gradient Boosting"}, {"mlp", "Neural network"},
      {"svr", "Support vector regression"}, {"gpr", "Gaussian process regression"},
      {"ridge", "Ridge"},           {"lasso", "Lasso"},          {"tree", "Decision tree"},
      {"mean", "Mean predictor"}};
  const auto it = titles.find(name);
  return it == titles.end() ? name : it->second;
}

// ---------------------------------------------------------------------------

void cmd_ingest(Context& ctx) {
  auto registry = load_registry(ctx);
  const ElementTable elements = *load_elements_if(ctx, *registry, true);
  const Dataset ds = load_records(ctx, registry);
  json issues = json::array();
  std::size_t rejected = 0;
  for (const auto& i : ds.issues) {
    issues.push_back({{"line", i.line}, {"column", i.column}, {"message", i.message}, {"rejected", i.rejected}});
    rejected += i.rejected ? 1 : 0;
  }
  json warnings = json::array();
  for (const auto& w : registry->warnings)
    warnings.push_back({{"line", w.line}, {"column", w.column}, {"message", w.message}});
  json result = {{"materials", registry->size()},
                 {"elements", elements.size()},
                 {"records", ds.size()},
                 {"rejected_rows", rejected},
                 {"issues", issues},
                 {"material_warnings", warnings}};
  ctx.write_text("records_clean.csv", serialize_dataset(ds));
  ctx.write_json("ingest.json", result);
}

void cmd_stats(Context& ctx) {
  auto registry = load_registry(ctx);
  const Dataset ds = load_records(ctx, registry);
  const SummaryStats s = summarize(ds);
  json hist = json::array();
  std::string hist_csv = csv_line({"quantity", "unit", "bin", "lo", "hi", "count"});
  for (const auto& h : s.histograms) {
    hist.push_back({{"quantity", h.quantity}, {"unit", h.unit}, {"lo", h.lo}, {"hi", h.hi},
                    {"counts", h.counts}, {"missing", h.missing}});
    const double width = h.counts.empty() ? 0.0 : (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      hist_csv += csv_line({h.quantity, h.unit, std::to_string(b), format_number(h.lo + width * double(b)),
                            format_number(h.lo + width * double(b + 1)), std::to_string(h.counts[b])});
  }
  std::string cat_csv = csv_line({"axis", "level", "count"});
  for (const auto& [axis, levels] : s.categories)
    for (const auto& [level, count] : levels) cat_csv += csv_line({axis, level, std::to_string(count)});
  std::string label_csv = csv_line({"label", "count"});
  for (const auto& [label, count] : s.label_counts) label_csv += csv_line({label, std::to_string(count)});
  json result = {{"n_records", s.n_records},
                 {"categories", s.categories},
                 {"label_counts", s.label_counts},
                 {"histograms", hist}};
  ctx.write_text("stats_categories.csv", cat_csv);
  ctx.write_text("stats_labels.csv", label_csv);
  ctx.write_text("stats_histograms.csv", hist_csv);
  ctx.write_json("stats.json", result);
}

void cmd_cv(Context& ctx) {
  const LearnerConfig cfg = learner_config(ctx);
  TaskData t = task_data(ctx);
  const auto folds = kfold_indices(t.x.rows() > 0 ? static_cast<std::size_t>(t.x.rows()) : 0, ctx.cfg.k, ctx.seed);
  CvReport rep = cross_validate_matrix(cfg, t.x, t.y, folds, ctx.seed, t.plan.standardize_onehot);
  rep.task = std::string(to_string(t.label));
  rep.featurization = featurization_tag(t.plan);
  ctx.write_text("cv_folds.csv", rep.folds_csv());
  ctx.write_text("cv_predictions.csv", rep.predictions_csv());
  ctx.write_json("cv.json", rep.to_json());
}

json pipeline_json(const TaskData& t, const Standardizer& s, const TrainedModel& m) {
  return {{"format_version", kFormatVersion},
          {"plan",
           {{"featurization", std::string(to_string(t.plan.kind))},
            {"standardize_onehot", t.plan.standardize_onehot},
            {"dropped_groups", t.plan.dropped_groups}}},
          {"label", std::string(to_string(t.label))},
          {"schema", t.x.schema.to_json()},
          {"standardizer", s.to_json()},
          {"model", model_to_json(m)}};
}

struct Fitted {
  Standardizer standardizer;
  FeatureMatrix xs;
  TrainedModel model;
};

Fitted fit_all(const Context& ctx, const TaskData& t, const LearnerConfig& cfg) {
  Fitted f;
  f.standardizer = fit_standardizer(t.x, t.plan.standardize_onehot);
  f.xs = apply_standardizer(f.standardizer, t.x);
  f.model = fit(with_seed(cfg, derive_seed(ctx.seed, {0x747261})), f.xs, t.y);
  return f;
}

void cmd_train(Context& ctx) {
  const LearnerConfig cfg = learner_config(ctx);
  TaskData t = task_data(ctx);
  const Fitted f = fit_all(ctx, t, cfg);
  const Eigen::VectorXd pred = predict(f.model, f.xs);
  json result = {{"task", std::string(to_string(t.label))},
                 {"featurization", featurization_tag(t.plan)},
                 {"config", config_to_json(cfg)},
                 {"n_records", t.ds.size()},
                 {"n_features", t.x.cols()},
                 {"converged", f.model.converged},
                 {"train_r2", r2(t.y, pred)},
                 {"train_mae", mae(t.y, pred)},
                 {"model_file", "model.json"}};
  ctx.write_text("model.json", pipeline_json(t, f.standardizer, f.model).dump(1) + "\n");
  ctx.write_json("train.json", result);
}

void cmd_tune(Context& ctx) {
  TaskData t = task_data(ctx);
  const std::string family = ctx.cfg.model == "nn" ? "mlp" : ctx.cfg.model;
  const SearchSpace space = builtin_space(t.label, family);
  const LearnerConfig base = ctx.cfg.learner_config.empty() ? family_config(family) : learner_config(ctx);
  const auto folds = kfold_indices(static_cast<std::size_t>(t.x.rows()), ctx.cfg.k, ctx.seed);
  const Objective objective = [&](const ParamSet& p) {
    return cross_validate_matrix(apply_params(base, p), t.x, t.y, folds, ctx.seed, t.plan.standardize_onehot).mean_r2;
  };
  TrialHistory h;
  if (ctx.cfg.method == "tpe") {
    h = tpe_search(space, objective, ctx.cfg.trials, ctx.seed);
  } else if (ctx.cfg.method == "random") {
    h = random_search(space, objective, ctx.cfg.trials, ctx.seed);
  } else if (ctx.cfg.method == "grid") {
    h = grid_search(space, objective, ctx.cfg.resolution);
  } else {
    throw ValidationError("unknown search method '" + ctx.cfg.method + "' (tpe, random, grid)");
  }
  const Trial* best = h.best_trial();
  if (!best) throw ConvergenceError("every tuning trial failed");
  const LearnerConfig best_cfg = apply_params(base, best->params);

  std::string csv = csv_line({"trial", "objective", "params", "message"});
  for (const auto& tr : h.trials)
    csv += csv_line({std::to_string(tr.index), tr.objective ? format_number(*tr.objective) : "",
                     params_to_json(tr.params).dump(), tr.message});
  const auto ref = reference_optimum(t.label, family);
  json result = {{"task", std::string(to_string(t.label))},
                 {"family", family},
                 {"space", space.to_json()},
                 {"history", h.to_json()},
                 {"best_params", params_to_json(best->params)},
                 {"best_objective", *best->objective},
                 {"best_config", config_to_json(best_cfg)},
                 {"reference_optimum", ref ? params_to_json(*ref) : json(nullptr)}};
  ctx.write_text("trials.csv", csv);
  ctx.write_json("best.json", {{"config", config_to_json(best_cfg)},
                               {"params", params_to_json(best->params)},
                               {"objective", *best->objective}});
  ctx.write_json("tune.json", result);
}

std::vector<ShapExplanation> explain_rows(const Context& ctx, const TaskData& t, const Fitted& f,
                                          std::vector<std::size_t>& rows) {
  const auto n = static_cast<std::size_t>(t.x.rows());
  const auto bg_rows = sample_background(n, ctx.cfg.background, derive_seed(ctx.seed, {0x6267}));
  Eigen::MatrixXd bg(static_cast<Eigen::Index>(bg_rows.size()), f.xs.cols());
  for (std::size_t i = 0; i < bg_rows.size(); ++i)
    bg.row(static_cast<Eigen::Index>(i)) = f.xs.values.row(static_cast<Eigen::Index>(bg_rows[i]));
  rows = sample_background(n, ctx.cfg.instances, derive_seed(ctx.seed, {0x696e73}));
  if (ctx.cfg.index) {
    if (*ctx.cfg.index < 1 || *ctx.cfg.index > n)
      throw ValidationError("--index " + std::to_string(*ctx.cfg.index) + " outside 1.." + std::to_string(n));
    const std::size_t want = *ctx.cfg.index - 1;
    rows.erase(std::remove(rows.begin(), rows.end(), want), rows.end());
    rows.insert(rows.begin(), want);
  }
  std::vector<ShapExplanation> ex(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    ex[i] = tree_shap(f.model, f.xs.values.row(r).transpose(), bg);
    ex[i].feature_values = t.x.values.row(r).transpose();
  });
  return ex;
}

void cmd_importance(Context& ctx) {
  const LearnerConfig cfg = learner_config(ctx);
  TaskData t = task_data(ctx);
  ImportanceReport rep;
  if (ctx.cfg.kind == "drop-column" || ctx.cfg.kind == "drop_column") {
    rep = drop_column_importance(cfg, t.x, t.y, ctx.cfg.k, ctx.seed, t.plan.standardize_onehot);
  } else if (ctx.cfg.kind == "gain") {
    const Fitted f = fit_all(ctx, t, cfg);
    rep = gain_importance(f.model, t.x.schema.names());
  } else if (ctx.cfg.kind == "shap") {
    const Fitted f = fit_all(ctx, t, cfg);
    std::vector<std::size_t> rows;
    rep = mean_abs_shap(explain_rows(ctx, t, f, rows), t.x.schema.names());
  } else {
    throw ValidationError("unknown importance kind '" + ctx.cfg.kind + "' (drop-column, gain, shap)");
  }
  ctx.write_text("importance.csv", rep.to_csv());
  ctx.write_json("importance.json", rep.to_json());
}

void cmd_shap(Context& ctx) {
  const LearnerConfig cfg = learner_config(ctx);
  TaskData t = task_data(ctx);
  const Fitted f = fit_all(ctx, t, cfg);
  std::vector<std::size_t> rows;
  const auto ex = explain_rows(ctx, t, f, rows);
  const json prov = ctx.envelope({{"rows", rows}, {"record_ids", [&] {
                                   std::vector<std::size_t> ids;
                                   for (auto r : rows) ids.push_back(t.x.row_ids[r]);
                                   return ids;
                                 }()}});
  write_shap_exports(ex, t.x.schema.names(), ctx.out("shap"), prov);
  const GroupedExplanations g = aggregate_groups(ex, t.x.schema);
  write_shap_exports(g.explanations, g.names, ctx.out("shap_grouped"), prov);
  double worst = 0.0;
  for (const auto& e : ex) worst = std::max(worst, std::abs(e.base_value + e.phis.sum() - e.prediction));
  ctx.write_json("shap.json", {{"instances", ex.size()},
                               {"background", std::min<std::size_t>(ctx.cfg.background, t.ds.size())},
                               {"base_value", ex.empty() ? 0.0 : ex.front().base_value},
                               {"max_local_accuracy_error", worst},
                               {"rows", rows}});
}

void cmd_discover(Context& ctx) {
  const LabelKind label = parse_task(ctx.cfg.task);
  auto registry = load_registry(ctx);
  const Dataset ds = load_records(ctx, registry);
  const QuantityTable table = QuantityTable::standard(ctx.cfg.t0);
  const Constraints c = derive_constraints(table, label_dimension(label), ctx.cfg.paper_constraints);
  std::optional<std::string> condition;
  if (!ctx.cfg.condition.empty() && ctx.cfg.condition != "all") {
    condition = ctx.cfg.condition;
    // spell known conditions one way so reports group them
    if (const auto kind = parse_post_processing_kind(*condition); kind && *kind != PostProcessing::Kind::other)
      condition = PostProcessing{*kind, ""}.label();
  }
  const PowerLawData data = powerlaw_data(ds, label, condition, table);
  if (data.y.size() < 11)
    throw ValidationError("only " + std::to_string(data.y.size()) +
                          " records carry all nine quantities and the label for this condition");
  PowerLawOptions opts;
  opts.seed = ctx.seed;
  PowerLawModel m = fit_powerlaw(data.x, data.y, table, c, opts);
  m.label = std::string(to_string(label));
  m.condition = condition.value_or("all");
  const LogLinearFit init = fit_loglinear(data.x, data.y, c);
  json result = m.to_json();
  result["paper_constraints"] = ctx.cfg.paper_constraints;
  result["t0"] = ctx.cfg.t0;
  result["loglinear"] = {{"w0", init.w0}, {"exponents", vector_to_json(init.w)}, {"r2", init.r2},
                         {"log_r2", init.log_r2}};
  const Eigen::VectorXd pred = evaluate_powerlaw(m, data.x);
  const double si = label_to_si(label);
  std::string csv = csv_line({"record", "truth", "prediction"});
  for (Eigen::Index i = 0; i < pred.size(); ++i)
    csv += csv_line({std::to_string(data.records[static_cast<std::size_t>(i)]), format_number(data.y(i) / si),
                     format_number(pred(i) / si)});
  ctx.write_text("powerlaw_predictions.csv", csv);
  ctx.write_json("model.json", result);
}

void cmd_learning_curve(Context& ctx) {
  const LearnerConfig cfg = learner_config(ctx);
  TaskData t = task_data(ctx);
  LearningCurve lc = learning_curve(cfg, t.x, t.y, ctx.cfg.fractions, ctx.cfg.repeats, ctx.cfg.k, ctx.seed,
                                    t.plan.standardize_onehot);
  lc.task = std::string(to_string(t.label));
  ctx.write_text("learning_curve.csv", lc.to_csv());
  ctx.write_json("learning_curve.json", lc.to_json());
}

void cmd_corr(Context& ctx) {
  auto registry = load_registry(ctx);
  const Dataset ds = load_records(ctx, registry);
  std::vector<LabelKind> labels;
  if (ctx.cfg.labels.empty()) labels.assign(kAllLabels.begin(), kAllLabels.end());
  for (const auto& s : ctx.cfg.labels) labels.push_back(parse_task(s));
  std::optional<std::string> material;
  if (!ctx.cfg.material.empty()) material = ctx.cfg.material;
  const CorrelationMatrix m = pearson_matrix(ds, labels, material);
  ctx.write_text("corr.csv", m.to_csv());
  ctx.write_json("corr.json", m.to_json());
}

// Table-6 and Table-9 style summaries from stored cv and discover reports only.
void cmd_report(Context& ctx) {
  std::vector<fs::path> files;
  for (const auto& in : ctx.cfg.inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::recursive_directory_iterator(in))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    } else if (fs::exists(in)) {
      files.push_back(in);
    } else {
      throw IoError("report input not found: " + in);
    }
  }
  std::sort(files.begin(), files.end());
  struct Best {
    std::string model;
    double value;
    std::string source;
  };
  std::map<std::string, Best> best_r2, best_mae;
  std::map<std::string, std::map<std::string, double>> eq_r2;  // task -> condition -> r2
  std::size_t used = 0;
  for (const auto& path : files) {
    json j;
    try {
      j = json::parse(read_text_file(path));
    } catch (const json::exception&) {
      continue;
    }
    if (!j.is_object() || !j.contains("command") || !j.contains("result")) continue;
    ctx.hash_file(path.string());
    const json& r = j["result"];
    const std::string cmd = j["command"].get<std::string>();
    if (cmd == "cv") {
      const std::string task = r.at("task");
      const std::string model = r.at("learner").at("type");
      const double r2v = r.at("mean_r2"), maev = r.at("mean_mae");
      if (!best_r2.count(task) || r2v > best_r2[task].value) best_r2[task] = {model, r2v, path.string()};
      if (!best_mae.count(task) || maev < best_mae[task].value) best_mae[task] = {model, maev, path.string()};
      ++used;
    } else if (cmd == "discover") {
      eq_r2[r.at("label")][r.at("condition")] = r.at("fit_r2");
      ++used;
    }
  }
  if (used == 0) throw ValidationError("no cv or discover reports among the report inputs");

  std::string t6 = csv_line({"category", "metric", "best model", "value"});
  json rows6 = json::array();
  for (LabelKind k : kAllLabels) {
    const std::string task(to_string(k));
    if (!best_r2.count(task)) continue;
    const std::string cat(label_title(k));
    t6 += csv_line({cat, "R2", model_title(best_r2[task].model), format_number(best_r2[task].value)});
    t6 += csv_line({cat, "MAE", model_title(best_mae[task].model), format_number(best_mae[task].value)});
    rows6.push_back({{"category", cat}, {"metric", "R2"}, {"best_model", best_r2[task].model},
                     {"value", best_r2[task].value}, {"source", best_r2[task].source}});
    rows6.push_back({{"category", cat}, {"metric", "MAE"}, {"best_model", best_mae[task].model},
                     {"value", best_mae[task].value}, {"unit", std::string(label_unit(k))},
                     {"source", best_mae[task].source}});
  }
  std::string t9 = csv_line({"task", "condition", "identified equation R2", "ML R2"});
  json rows9 = json::array();
  for (LabelKind k : kAllLabels) {
    const std::string task(to_string(k));
    if (!eq_r2.count(task)) continue;
    for (const auto& [cond, r2v] : eq_r2[task]) {
      const bool has_ml = best_r2.count(task) > 0;
      const double ml = has_ml ? best_r2[task].value : 0.0;
      t9 += csv_line({std::string(label_title(k)), cond, format_number(r2v), has_ml ? format_number(ml) : ""});
      rows9.push_back({{"task", task}, {"condition", cond}, {"equation_r2", r2v},
                       {"ml_r2", has_ml ? json(ml) : json(nullptr)}});
    }
  }
  ctx.write_text("table6.csv", t6);
  ctx.write_text("table9.csv", t9);
  ctx.write_json("report.json", {{"table6", rows6}, {"table9", rows9}, {"reports_used", used}});
}

void cmd_synth(Context& ctx) {
  auto registry = load_registry(ctx);
  Dataset ds;
  if (ctx.cfg.generator == "benchmark") {
    ds = generate_benchmark(registry, {ctx.cfg.n ? ctx.cfg.n : 1600, ctx.seed});
  } else if (ctx.cfg.generator == "powerlaw") {
    ds = generate_powerlaw_benchmark(registry, {ctx.cfg.n ? ctx.cfg.n : 800, ctx.cfg.noise, ctx.seed});
  } else if (ctx.cfg.generator == "oracle") {
    ds = oracle_dataset(registry, ctx.cfg.n ? ctx.cfg.n : 200, ctx.cfg.n_materials, ctx.cfg.noise, ctx.seed,
                        ctx.cfg.t0);
  } else {
    throw ValidationError("unknown generator '" + ctx.cfg.generator + "' (benchmark, powerlaw, oracle)");
  }
  ctx.write_text("records.csv", serialize_dataset(ds));
  ctx.write_json("synth.json", {{"generator", ctx.cfg.generator}, {"records", ds.size()}});
}

}  // namespace

int run(const std::vector<std::string>& args) {
  RunConfig c;
  if (const char* dir = std::getenv("MAMPROP_DATA_DIR")) c.data_dir = dir;
  if (c.data_dir.empty()) c.data_dir = "data";

  CLI::App app{"Mechanical property benchmark for metal additive manufacturing"};
  app.name("mamprop");
  app.set_config("--config", "", "TOML/INI file with option values; flags override it");
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--data-dir", c.data_dir, "Directory holding materials.csv, elements.csv, records.csv");
  app.add_option("--materials", c.materials, "Material table");
  app.add_option("--elements", c.elements, "Element table");
  app.add_option("--records", c.records, "Experimental records");
  app.add_option("-o,--out", c.out, "Output directory");
  app.add_option("--task,--label", c.task, "ys, uts, e_mod, elongation, hv, hrc, rz");
  app.add_option("--featurization", c.featurization, "baseline, composition, elemental");
  app.add_option("--model", c.model, "mean, ridge, lasso, tree, rf, gb, xgb, gpr, mlp, svr");
  app.add_option("--learner-config", c.learner_config, "Learner JSON (e.g. best.json from tune)");
  app.add_option("--seed", c.seed, "Root seed; a random one is chosen and printed when omitted");
  app.add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--strict", c.strict, "Reject implausible values instead of warning");
  app.add_flag("--standardize-onehot", c.standardize_onehot, "Standardize one-hot columns too");
  app.add_flag("--paper-constraints", c.paper_constraints, "Use the printed temperature constraint");
  app.add_option("--t0", c.t0, "Ambient reference temperature, deg C");
  app.add_option("--k", c.k, "Cross-validation folds")->check(CLI::Range(2, 1000));
  app.add_option("--drop", c.drop, "Feature groups to remove");
  app.add_option("--trials", c.trials, "Tuning trials");
  app.add_option("--method", c.method, "tpe, random, grid");
  app.add_option("--resolution", c.resolution, "Grid points per numeric parameter");
  app.add_option("--kind", c.kind, "Importance kind: drop-column, gain, shap");
  app.add_option("--instances", c.instances, "Rows to explain");
  app.add_option("--background", c.background, "Background rows for SHAP");
  app.add_option("--index", c.index, "1-based row of the task dataset to explain first");
  app.add_option("--condition", c.condition, "Post-processing condition for discover (or 'all')");
  app.add_option("--fractions", c.fractions, "Training fractions for the learning curve");
  app.add_option("--repeats", c.repeats, "Learning-curve repeats");
  app.add_option("--material", c.material, "Restrict correlations to one material");
  app.add_option("--labels", c.labels, "Labels for the correlation matrix");
  app.add_option("--inputs", c.inputs, "Report files or directories for 'report'");
  app.add_option("--generator", c.generator, "synth generator: benchmark, powerlaw, oracle");
  app.add_option("--n", c.n, "Records to generate");
  app.add_option("--n-materials", c.n_materials, "Materials in the oracle data");
  app.add_option("--noise", c.noise, "Relative noise of generated labels");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ingest", "Validate inputs and write a cleaned record file"},
      {"stats", "Category counts, label counts and parameter histograms"},
      {"cv", "k-fold cross-validation of one learner"},
      {"train", "Fit on every complete record and save the pipeline"},
      {"tune", "Hyperparameter search maximizing mean CV R^2"},
      {"importance", "Drop-column, gain or mean |SHAP| importance"},
      {"shap", "SHAP values and plot data for a tree ensemble"},
      {"discover", "Dimensionally constrained power-law identification"},
      {"learning-curve", "CV error against training-set fraction"},
      {"corr", "Pearson correlations between labels"},
      {"report", "Best-model and equation-vs-ML tables from stored reports"},
      {"synth", "Generate synthetic records"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << error_code(ErrorKind::validation) << ": " << e.what() << "\n";
    return static_cast<int>(ErrorKind::validation);
  }

  Context ctx;
  c.command = app.get_subcommands().front()->get_name();
  if (c.materials.empty()) c.materials = (fs::path(c.data_dir) / "materials.csv").string();
  if (c.elements.empty()) c.elements = (fs::path(c.data_dir) / "elements.csv").string();
  if (c.records.empty()) c.records = (fs::path(c.data_dir) / "records.csv").string();
  if (!c.seed) {
    c.seed = std::random_device{}();
    std::cerr << "seed: " << *c.seed << "\n";
  }
  ctx.cfg = c;
  ctx.seed = *c.seed;
  set_max_jobs(c.jobs);

  try {
    const std::string& cmd = c.command;
    if (cmd == "ingest") cmd_ingest(ctx);
    else if (cmd == "stats") cmd_stats(ctx);
    else if (cmd == "cv") cmd_cv(ctx);
    else if (cmd == "train") cmd_train(ctx);
    else if (cmd == "tune") cmd_tune(ctx);
    else if (cmd == "importance") cmd_importance(ctx);
    else if (cmd == "shap") cmd_shap(ctx);
    else if (cmd == "discover") cmd_discover(ctx);
    else if (cmd == "learning-curve") cmd_learning_curve(ctx);
    else if (cmd == "corr") cmd_corr(ctx);
    else if (cmd == "report") cmd_report(ctx);
    else if (cmd == "synth") cmd_synth(ctx);
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "error: " << error_code(e.kind()) << ": " << msg << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: E_INTERNAL: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mamprop::cli
