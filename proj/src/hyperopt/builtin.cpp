#include <cmath>

#include "mamprop/error.hpp"
#include "mamprop/hyperopt.hpp"

namespace mamprop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string canonical_family(const std::string& f) {
  if (f == "nn" || f == "mlp") return "mlp";
  if (f == "rf" || f == "gb" || f == "svr") return f;
  if (f == "xgb") return "gb";
  return f;
}

double as_double(const ParamValue& v, const std::string& name) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw ValidationError("parameter '" + name + "' must be numeric");
}

long as_int(const ParamValue& v, const std::string& name) {
  const double d = as_double(v, name);
  if (d != std::floor(d)) throw ValidationError("parameter '" + name + "' must be an integer");
  return static_cast<long>(d);
}

std::string as_string(const ParamValue& v, const std::string& name) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw ValidationError("parameter '" + name + "' must be a string");
}

struct Optimum {
  LabelKind task;
  long rf;
  long svr_c;
  const char* kernel;
  long degree;  // 0 when the kernel has none
  long gb;
  long n1, n2, n3;
  double alpha;
};

constexpr Optimum kOptima[] = {
    {LabelKind::ys, 382, 698, "poly", 2, 500, 128, 256, 32, 0.04943663345976882},
    {LabelKind::uts, 500, 982, "rbf", 0, 500, 256, 256, 512, 0.04030067181655384},
    {LabelKind::e_mod, 43, 43, "rbf", 0, 316, 32, 512, 256, 0.041329503263237435},
    {LabelKind::elongation, 463, 982, "rbf", 0, 462, 128, 32, 64, 0.04074280425105631},
    {LabelKind::hv, 492, 975, "rbf", 0, 192, 32, 256, 32, 0.04925337472160725},
    {LabelKind::hrc, 297, 234, "poly", 3, 235, 32, 128, 128, 0.06155030321486836},
    {LabelKind::rz, 42, 42, "rbf", 0, 42, 512, 32, 128, 0.06833260439770075},
};

}  // namespace

SearchSpace builtin_space(LabelKind task, const std::string& family) {
  (void)task;  // every task shares the same ranges
  const std::string f = canonical_family(family);
  SearchSpace s;
  if (f == "rf" || f == "gb") {
    s.add("n_estimators", IntUniform{1, 500});
  } else if (f == "svr") {
    s.add("C", IntUniform{1, 1000});
    s.add("kernel", Categorical{{std::string("linear"), std::string("poly"), std::string("rbf"),
                                 std::string("sigmoid")}});
    s.add("degree", Categorical{{std::int64_t{2}, std::int64_t{3}, std::int64_t{4}}},
          Condition{"kernel", std::string("poly")});
  } else if (f == "mlp") {
    const Categorical widths{{std::int64_t{32}, std::int64_t{64}, std::int64_t{128}, std::int64_t{256},
                              std::int64_t{512}}};
    s.add("neurons_1", widths);
    s.add("neurons_2", widths);
    s.add("neurons_3", widths);
    s.add("alpha", FloatLogUniform{1e-7, 1e-1});
  } else {
    throw ValidationError("no benchmark search space for model family '" + family + "'");
  }
  return s;
}

std::optional<ParamSet> reference_optimum(LabelKind task, const std::string& family) {
  const std::string f = canonical_family(family);
  for (const auto& o : kOptima) {
    if (o.task != task) continue;
    if (f == "rf") return ParamSet{{"n_estimators", std::int64_t{o.rf}}};
    if (f == "gb") return ParamSet{{"n_estimators", std::int64_t{o.gb}}};
    if (f == "svr") {
      ParamSet p{{"C", std::int64_t{o.svr_c}}, {"kernel", std::string(o.kernel)}};
      if (o.degree) p["degree"] = std::int64_t{o.degree};
      return p;
    }
    if (f == "mlp") {
      return ParamSet{{"neurons_1", std::int64_t{o.n1}},
                      {"neurons_2", std::int64_t{o.n2}},
                      {"neurons_3", std::int64_t{o.n3}},
                      {"alpha", o.alpha}};
    }
  }
  return std::nullopt;
}

LearnerConfig family_config(const std::string& family) {
  const std::string f = canonical_family(family);
  if (family == "xgb") return default_config("xgb");
  if (f == "mlp") {
    MlpConfig c;
    c.layer_sizes = {100, 100, 100};
    return c;
  }
  return default_config(f);
}

LearnerConfig apply_params(const LearnerConfig& base, const ParamSet& params) {
  LearnerConfig cfg = base;
  auto unknown = [&](const std::string& name) {
    return ValidationError("parameter '" + name + "' does not apply to learner '" + learner_name(base) + "'");
  };
  std::map<int, int> neurons;
  for (const auto& [name, v] : params) {
    std::visit(
        overloaded{
            [&](MeanConfig&) { throw unknown(name); },
            [&](RidgeConfig& c) {
              if (name == "lambda") c.lambda = as_double(v, name);
              else throw unknown(name);
            },
            [&](LassoConfig& c) {
              if (name == "lambda") c.lambda = as_double(v, name);
              else throw unknown(name);
            },
            [&](TreeConfig& c) {
              if (name == "max_depth") c.max_depth = static_cast<int>(as_int(v, name));
              else if (name == "min_samples_leaf") c.min_samples_leaf = static_cast<int>(as_int(v, name));
              else throw unknown(name);
            },
            [&](ForestConfig& c) {
              if (name == "n_estimators") c.n_estimators = static_cast<int>(as_int(v, name));
              else if (name == "max_depth") c.max_depth = static_cast<int>(as_int(v, name));
              else if (name == "max_features") c.max_features = static_cast<int>(as_int(v, name));
              else if (name == "min_samples_leaf") c.min_samples_leaf = static_cast<int>(as_int(v, name));
              else throw unknown(name);
            },
            [&](BoostingConfig& c) {
              if (name == "n_estimators") c.n_estimators = static_cast<int>(as_int(v, name));
              else if (name == "learning_rate") c.learning_rate = as_double(v, name);
              else if (name == "max_depth") c.max_depth = static_cast<int>(as_int(v, name));
              else if (name == "l1_leaf") c.l1_leaf = as_double(v, name);
              else if (name == "l2_leaf") c.l2_leaf = as_double(v, name);
              else if (name == "subsample") c.subsample = as_double(v, name);
              else throw unknown(name);
            },
            [&](GprConfig& c) {
              if (name == "length_scale") c.length_scale = as_double(v, name);
              else if (name == "signal_var") c.signal_var = as_double(v, name);
              else if (name == "noise_var") c.noise_var = as_double(v, name);
              else throw unknown(name);
            },
            [&](MlpConfig& c) {
              if (name.rfind("neurons_", 0) == 0) {
                neurons[std::stoi(name.substr(8))] = static_cast<int>(as_int(v, name));
              } else if (name == "alpha") {
                c.alpha = as_double(v, name);
              } else if (name == "learning_rate") {
                c.learning_rate = as_double(v, name);
              } else if (name == "epochs") {
                c.epochs = static_cast<int>(as_int(v, name));
              } else if (name == "batch_size") {
                c.batch_size = static_cast<int>(as_int(v, name));
              } else {
                throw unknown(name);
              }
            },
            [&](SvrConfig& c) {
              if (name == "C") {
                c.c = as_double(v, name);
              } else if (name == "epsilon") {
                c.epsilon = as_double(v, name);
              } else if (name == "kernel") {
                auto k = parse_kernel(as_string(v, name));
                if (!k) throw ValidationError("unknown kernel '" + as_string(v, name) + "'");
                c.kernel.type = *k;
              } else if (name == "degree") {
                c.kernel.degree = static_cast<int>(as_int(v, name));
              } else if (name == "gamma") {
                c.kernel.gamma = as_double(v, name);
              } else if (name == "coef0") {
                c.kernel.coef0 = as_double(v, name);
              } else {
                throw unknown(name);
              }
            },
        },
        cfg);
  }
  if (!neurons.empty()) {
    auto& c = std::get<MlpConfig>(cfg);
    c.layer_sizes.clear();
    int expect = 1;
    for (const auto& [idx, width] : neurons) {
      if (idx != expect++) throw ValidationError("neurons_N parameters must be numbered 1..N");
      c.layer_sizes.push_back(width);
    }
  }
  validate_config(cfg);
  return cfg;
}

}  // namespace mamprop
