#include <cmath>

#include "mamprop/error.hpp"
#include "mamprop/learners.hpp"

namespace mamprop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_count(long v, const char* what) {
  if (v < 1) throw ValidationError(std::string(what) + " must be >= 1");
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be > 0");
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be >= 0");
}

nlohmann::json opt(const std::optional<int>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<int> get_opt_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<int>();
}

template <class T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

std::string_view to_string(KernelType k) {
  switch (k) {
    case KernelType::linear: return "linear";
    case KernelType::poly: return "poly";
    case KernelType::rbf: return "rbf";
    case KernelType::sigmoid: return "sigmoid";
  }
  return "rbf";
}

std::optional<KernelType> parse_kernel(std::string_view s) {
  if (s == "linear") return KernelType::linear;
  if (s == "poly") return KernelType::poly;
  if (s == "rbf") return KernelType::rbf;
  if (s == "sigmoid") return KernelType::sigmoid;
  return std::nullopt;
}

std::string learner_name(const LearnerConfig& cfg) {
  return std::visit(overloaded{
                        [](const MeanConfig&) { return "mean"; },
                        [](const RidgeConfig&) { return "ridge"; },
                        [](const LassoConfig&) { return "lasso"; },
                        [](const TreeConfig&) { return "tree"; },
                        [](const ForestConfig&) { return "rf"; },
                        [](const BoostingConfig&) { return "gb"; },
                        [](const GprConfig&) { return "gpr"; },
                        [](const MlpConfig&) { return "mlp"; },
                        [](const SvrConfig&) { return "svr"; },
                    },
                    cfg);
}

LearnerConfig default_config(const std::string& name) {
  if (name == "mean") return MeanConfig{};
  if (name == "ridge") return RidgeConfig{};
  if (name == "lasso") return LassoConfig{};
  if (name == "tree") return TreeConfig{};
  if (name == "rf") return ForestConfig{};
  if (name == "gb") return BoostingConfig{};
  if (name == "xgb") {
    BoostingConfig c;
    c.learning_rate = 0.3;
    c.max_depth = 6;
    c.l2_leaf = 1.0;
    return c;
  }
  if (name == "gpr") return GprConfig{};
  if (name == "mlp" || name == "nn") return MlpConfig{};
  if (name == "svr") return SvrConfig{};
  throw ValidationError("unknown learner '" + name + "'");
}

LearnerConfig with_seed(const LearnerConfig& cfg, std::uint64_t seed) {
  LearnerConfig out = cfg;
  std::visit(overloaded{
                 [&](ForestConfig& c) { c.seed = seed; },
                 [&](BoostingConfig& c) { c.seed = seed; },
                 [&](MlpConfig& c) { c.seed = seed; },
                 [](auto&) {},
             },
             out);
  return out;
}

void validate_config(const LearnerConfig& cfg) {
  std::visit(overloaded{
                 [](const MeanConfig&) {},
                 [](const RidgeConfig& c) { require_nonnegative(c.lambda, "ridge lambda"); },
                 [](const LassoConfig& c) {
                   require_nonnegative(c.lambda, "lasso lambda");
                   require_count(c.max_iter, "lasso max_iter");
                   require_positive(c.tol, "lasso tol");
                 },
                 [](const TreeConfig& c) {
                   if (c.max_depth) require_count(*c.max_depth, "max_depth");
                   require_count(c.min_samples_leaf, "min_samples_leaf");
                 },
                 [](const ForestConfig& c) {
                   require_count(c.n_estimators, "n_estimators");
                   if (c.max_depth) require_count(*c.max_depth, "max_depth");
                   if (c.max_features) require_count(*c.max_features, "max_features");
                   require_count(c.min_samples_leaf, "min_samples_leaf");
                 },
                 [](const BoostingConfig& c) {
                   require_count(c.n_estimators, "n_estimators");
                   require_positive(c.learning_rate, "learning_rate");
                   require_count(c.max_depth, "max_depth");
                   require_count(c.min_samples_leaf, "min_samples_leaf");
                   require_nonnegative(c.l1_leaf, "l1_leaf");
                   require_nonnegative(c.l2_leaf, "l2_leaf");
                   require_positive(c.subsample, "subsample");
                   if (c.subsample > 1.0) throw ValidationError("subsample must be <= 1");
                 },
                 [](const GprConfig& c) {
                   require_positive(c.length_scale, "length_scale");
                   require_positive(c.signal_var, "signal_var");
                   require_positive(c.noise_var, "noise_var");
                 },
                 [](const MlpConfig& c) {
                   if (c.layer_sizes.empty()) throw ValidationError("layer_sizes must not be empty");
                   for (int w : c.layer_sizes) require_count(w, "layer size");
                   require_nonnegative(c.alpha, "alpha");
                   require_positive(c.learning_rate, "learning_rate");
                   require_count(c.epochs, "epochs");
                   require_count(c.batch_size, "batch_size");
                   if (c.activation != "silu" && c.activation != "relu" && c.activation != "tanh") {
                     throw ValidationError("unknown activation '" + c.activation + "'");
                   }
                 },
                 [](const SvrConfig& c) {
                   require_positive(c.c, "C");
                   require_nonnegative(c.epsilon, "epsilon");
                   require_count(c.max_iter, "max_iter");
                   require_positive(c.tol, "tol");
                   require_count(c.kernel.degree, "degree");
                   if (c.kernel.gamma) require_positive(*c.kernel.gamma, "gamma");
                 },
             },
             cfg);
}

nlohmann::json config_to_json(const LearnerConfig& cfg) {
  nlohmann::json j = std::visit(
      overloaded{
          [](const MeanConfig&) { return nlohmann::json::object(); },
          [](const RidgeConfig& c) { return nlohmann::json{{"lambda", c.lambda}}; },
          [](const LassoConfig& c) {
            return nlohmann::json{{"lambda", c.lambda}, {"max_iter", c.max_iter}, {"tol", c.tol}};
          },
          [](const TreeConfig& c) {
            return nlohmann::json{{"max_depth", opt(c.max_depth)},
                                  {"min_samples_leaf", c.min_samples_leaf}};
          },
          [](const ForestConfig& c) {
            return nlohmann::json{{"n_estimators", c.n_estimators},
                                  {"max_depth", opt(c.max_depth)},
                                  {"min_samples_leaf", c.min_samples_leaf},
                                  {"max_features", opt(c.max_features)},
                                  {"seed", c.seed}};
          },
          [](const BoostingConfig& c) {
            return nlohmann::json{{"n_estimators", c.n_estimators}, {"learning_rate", c.learning_rate},
                                  {"max_depth", c.max_depth},       {"min_samples_leaf", c.min_samples_leaf},
                                  {"l1_leaf", c.l1_leaf},           {"l2_leaf", c.l2_leaf},
                                  {"subsample", c.subsample},       {"seed", c.seed}};
          },
          [](const GprConfig& c) {
            return nlohmann::json{{"length_scale", c.length_scale},
                                  {"signal_var", c.signal_var},
                                  {"noise_var", c.noise_var}};
          },
          [](const MlpConfig& c) {
            return nlohmann::json{{"layer_sizes", c.layer_sizes}, {"alpha", c.alpha},
                                  {"learning_rate", c.learning_rate}, {"epochs", c.epochs},
                                  {"batch_size", c.batch_size},       {"seed", c.seed},
                                  {"activation", c.activation}};
          },
          [](const SvrConfig& c) {
            nlohmann::json k{{"type", to_string(c.kernel.type)},
                             {"degree", c.kernel.degree},
                             {"gamma", c.kernel.gamma ? nlohmann::json(*c.kernel.gamma)
                                                      : nlohmann::json(nullptr)},
                             {"coef0", c.kernel.coef0}};
            return nlohmann::json{{"c", c.c}, {"epsilon", c.epsilon}, {"kernel", k},
                                  {"max_iter", c.max_iter}, {"tol", c.tol}};
          },
      },
      cfg);
  j["type"] = learner_name(cfg);
  return j;
}

LearnerConfig config_from_json(const nlohmann::json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    LearnerConfig cfg = default_config(type);
    std::visit(overloaded{
                   [](MeanConfig&) {},
                   [&](RidgeConfig& c) { get_if(j, "lambda", c.lambda); },
                   [&](LassoConfig& c) {
                     get_if(j, "lambda", c.lambda);
                     get_if(j, "max_iter", c.max_iter);
                     get_if(j, "tol", c.tol);
                   },
                   [&](TreeConfig& c) {
                     c.max_depth = get_opt_int(j, "max_depth");
                     get_if(j, "min_samples_leaf", c.min_samples_leaf);
                   },
                   [&](ForestConfig& c) {
                     get_if(j, "n_estimators", c.n_estimators);
                     c.max_depth = get_opt_int(j, "max_depth");
                     get_if(j, "min_samples_leaf", c.min_samples_leaf);
                     c.max_features = get_opt_int(j, "max_features");
                     get_if(j, "seed", c.seed);
                   },
                   [&](BoostingConfig& c) {
                     get_if(j, "n_estimators", c.n_estimators);
                     get_if(j, "learning_rate", c.learning_rate);
                     get_if(j, "max_depth", c.max_depth);
                     get_if(j, "min_samples_leaf", c.min_samples_leaf);
                     get_if(j, "l1_leaf", c.l1_leaf);
                     get_if(j, "l2_leaf", c.l2_leaf);
                     get_if(j, "subsample", c.subsample);
                     get_if(j, "seed", c.seed);
                   },
                   [&](GprConfig& c) {
                     get_if(j, "length_scale", c.length_scale);
                     get_if(j, "signal_var", c.signal_var);
                     get_if(j, "noise_var", c.noise_var);
                   },
                   [&](MlpConfig& c) {
                     get_if(j, "layer_sizes", c.layer_sizes);
                     get_if(j, "alpha", c.alpha);
                     get_if(j, "learning_rate", c.learning_rate);
                     get_if(j, "epochs", c.epochs);
                     get_if(j, "batch_size", c.batch_size);
                     get_if(j, "seed", c.seed);
                     get_if(j, "activation", c.activation);
                   },
                   [&](SvrConfig& c) {
                     get_if(j, "c", c.c);
                     get_if(j, "epsilon", c.epsilon);
                     get_if(j, "max_iter", c.max_iter);
                     get_if(j, "tol", c.tol);
                     if (j.contains("kernel")) {
                       const auto& k = j.at("kernel");
                       auto type = parse_kernel(k.at("type").get<std::string>());
                       if (!type) throw SchemaError("unknown SVR kernel");
                       c.kernel.type = *type;
                       get_if(k, "degree", c.kernel.degree);
                       get_if(k, "coef0", c.kernel.coef0);
                       if (k.contains("gamma") && !k.at("gamma").is_null()) {
                         c.kernel.gamma = k.at("gamma").get<double>();
                       }
                     }
                   },
               },
               cfg);
    validate_config(cfg);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed learner config: ") + e.what());
  }
}

}  // namespace mamprop
