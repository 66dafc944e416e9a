#include "internal.hpp"
#include "mamprop/error.hpp"
#include "mamprop/io.hpp"

namespace mamprop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

nlohmann::json tree_to_json(const Tree& t) {
  std::vector<int> feature, left, right;
  std::vector<double> threshold, value, gain, cover;
  for (const auto& n : t.nodes) {
    feature.push_back(n.feature);
    left.push_back(n.left);
    right.push_back(n.right);
    threshold.push_back(n.threshold);
    value.push_back(n.value);
    gain.push_back(n.gain);
    cover.push_back(n.cover);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
          {"value", value},     {"gain", gain},           {"cover", cover}};
}

Tree tree_from_json(const nlohmann::json& j, std::size_t n_features) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const auto gain = j.at("gain").get<std::vector<double>>();
  const auto cover = j.at("cover").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
      value.size() != n || gain.size() != n || cover.size() != n) {
    throw SchemaError("tree node arrays are empty or differ in length");
  }
  Tree t;
  t.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = t.nodes[i];
    node = {feature[i], threshold[i], left[i], right[i], value[i], gain[i], cover[i]};
    if (node.is_leaf()) continue;
    const auto valid_child = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
    if (static_cast<std::size_t>(node.feature) >= n_features || !valid_child(node.left) ||
        !valid_child(node.right)) {
      throw SchemaError("tree node " + std::to_string(i) + " is malformed");
    }
  }
  return t;
}

nlohmann::json trees_to_json(const std::vector<Tree>& trees) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : trees) out.push_back(tree_to_json(t));
  return out;
}

std::vector<Tree> trees_from_json(const nlohmann::json& j, std::size_t n_features) {
  std::vector<Tree> out;
  for (const auto& t : j) out.push_back(tree_from_json(t, n_features));
  return out;
}

nlohmann::json kernel_to_json(const SvrKernel& k) {
  return {{"type", to_string(k.type)},
          {"degree", k.degree},
          {"gamma", k.gamma ? nlohmann::json(*k.gamma) : nlohmann::json(nullptr)},
          {"coef0", k.coef0}};
}

SvrKernel kernel_from_json(const nlohmann::json& j) {
  SvrKernel k;
  auto type = parse_kernel(j.at("type").get<std::string>());
  if (!type) throw SchemaError("unknown SVR kernel");
  k.type = *type;
  k.degree = j.at("degree").get<int>();
  if (!j.at("gamma").is_null()) k.gamma = j.at("gamma").get<double>();
  k.coef0 = j.at("coef0").get<double>();
  return k;
}

nlohmann::json params_to_json(const ModelParams& params) {
  return std::visit(
      overloaded{
          [](const MeanParams& p) { return nlohmann::json{{"value", p.value}}; },
          [](const LinearParams& p) {
            return nlohmann::json{{"weights", vector_to_json(p.weights)},
                                  {"intercept", p.intercept},
                                  {"iterations", p.iterations}};
          },
          [](const TreeParams& p) { return nlohmann::json{{"tree", tree_to_json(p.tree)}}; },
          [](const ForestParams& p) { return nlohmann::json{{"trees", trees_to_json(p.trees)}}; },
          [](const BoostingParams& p) {
            return nlohmann::json{{"base", p.base},
                                  {"trees", trees_to_json(p.trees)},
                                  {"train_loss", p.train_loss}};
          },
          [](const GprParams& p) {
            return nlohmann::json{{"x_train", matrix_to_json(p.x_train)},
                                  {"alpha", vector_to_json(p.alpha)},
                                  {"y_mean", p.y_mean},
                                  {"y_scale", p.y_scale},
                                  {"jitter", p.jitter}};
          },
          [](const MlpParams& p) {
            nlohmann::json w = nlohmann::json::array(), b = nlohmann::json::array();
            for (const auto& m : p.weights) w.push_back(matrix_to_json(m));
            for (const auto& v : p.biases) b.push_back(vector_to_json(v));
            return nlohmann::json{{"weights", w},
                                  {"biases", b},
                                  {"y_mean", p.y_mean},
                                  {"y_scale", p.y_scale},
                                  {"activation", p.activation}};
          },
          [](const SvrParams& p) {
            return nlohmann::json{{"support", matrix_to_json(p.support)},
                                  {"coef", vector_to_json(p.coef)},
                                  {"rho", p.rho},
                                  {"kernel", kernel_to_json(p.kernel)},
                                  {"iterations", p.iterations}};
          },
      },
      params);
}

ModelParams params_from_json(const LearnerConfig& cfg, const nlohmann::json& j, std::size_t nf) {
  auto check_len = [&](Eigen::Index got, const char* what) {
    if (static_cast<std::size_t>(got) != nf) {
      throw SchemaError(std::string(what) + " does not match the feature count");
    }
  };
  return std::visit(
      overloaded{
          [&](const MeanConfig&) -> ModelParams { return MeanParams{j.at("value").get<double>()}; },
          [&](const auto& c) -> ModelParams {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, RidgeConfig> || std::is_same_v<C, LassoConfig>) {
              LinearParams p;
              p.weights = vector_from_json(j.at("weights"));
              check_len(p.weights.size(), "linear weights");
              p.intercept = j.at("intercept").get<double>();
              p.iterations = j.at("iterations").get<int>();
              return p;
            } else if constexpr (std::is_same_v<C, TreeConfig>) {
              return TreeParams{tree_from_json(j.at("tree"), nf)};
            } else if constexpr (std::is_same_v<C, ForestConfig>) {
              ForestParams p{trees_from_json(j.at("trees"), nf)};
              if (p.trees.empty()) throw SchemaError("forest has no trees");
              return p;
            } else if constexpr (std::is_same_v<C, BoostingConfig>) {
              BoostingParams p;
              p.base = j.at("base").get<double>();
              p.trees = trees_from_json(j.at("trees"), nf);
              p.train_loss = j.at("train_loss").get<std::vector<double>>();
              return p;
            } else if constexpr (std::is_same_v<C, GprConfig>) {
              GprParams p;
              p.x_train = matrix_from_json(j.at("x_train"));
              check_len(p.x_train.cols(), "GPR inputs");
              p.alpha = vector_from_json(j.at("alpha"));
              if (p.alpha.size() != p.x_train.rows()) throw SchemaError("GPR dual size mismatch");
              p.y_mean = j.at("y_mean").get<double>();
              p.y_scale = j.at("y_scale").get<double>();
              p.jitter = j.at("jitter").get<double>();
              detail::gpr_factorize(p, c);
              return p;
            } else if constexpr (std::is_same_v<C, MlpConfig>) {
              MlpParams p;
              for (const auto& w : j.at("weights")) p.weights.push_back(matrix_from_json(w));
              for (const auto& b : j.at("biases")) p.biases.push_back(vector_from_json(b));
              if (p.weights.empty() || p.weights.size() != p.biases.size()) {
                throw SchemaError("MLP layer arrays are inconsistent");
              }
              check_len(p.weights.front().cols(), "MLP input layer");
              for (std::size_t l = 0; l < p.weights.size(); ++l) {
                if (p.weights[l].rows() != p.biases[l].size() ||
                    (l > 0 && p.weights[l].cols() != p.weights[l - 1].rows())) {
                  throw SchemaError("MLP layer shapes are inconsistent");
                }
              }
              p.y_mean = j.at("y_mean").get<double>();
              p.y_scale = j.at("y_scale").get<double>();
              p.activation = j.at("activation").get<std::string>();
              return p;
            } else {
              SvrParams p;
              p.support = matrix_from_json(j.at("support"));
              p.coef = vector_from_json(j.at("coef"));
              if (p.coef.size() != p.support.rows()) throw SchemaError("SVR coefficient size mismatch");
              if (p.support.rows() > 0) check_len(p.support.cols(), "SVR support vectors");
              p.rho = j.at("rho").get<double>();
              p.kernel = kernel_from_json(j.at("kernel"));
              p.iterations = j.at("iterations").get<long>();
              return p;
            }
          },
      },
      cfg);
}

}  // namespace

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(r);
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows)) {
    throw SchemaError("matrix shape does not match its data");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto r = data.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
    if (r.size() != static_cast<std::size_t>(cols)) throw SchemaError("ragged matrix row");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = r[static_cast<std::size_t>(k)];
  }
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json model_to_json(const TrainedModel& m) {
  return {{"format_version", kModelFormatVersion},
          {"config", config_to_json(m.config)},
          {"schema_fingerprint", hex64(m.schema_fingerprint)},
          {"n_features", m.n_features},
          {"converged", m.converged},
          {"params", params_to_json(m.params)}};
}

TrainedModel model_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("format_version")) {
      throw SchemaError("model document has no format_version");
    }
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw SchemaError("unsupported model format_version " + std::to_string(version) +
                        " (this build reads " + std::to_string(kModelFormatVersion) + ")");
    }
    TrainedModel m;
    m.config = config_from_json(j.at("config"));
    m.schema_fingerprint = std::stoull(j.at("schema_fingerprint").get<std::string>(), nullptr, 16);
    m.n_features = j.at("n_features").get<std::size_t>();
    m.converged = j.at("converged").get<bool>();
    m.params = params_from_json(m.config, j.at("params"), m.n_features);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed model: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw SchemaError("malformed model: bad schema fingerprint");
  } catch (const std::out_of_range&) {
    throw SchemaError("malformed model: bad schema fingerprint");
  }
}

void save_model(const TrainedModel& m, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(m).dump(1) + "\n");
}

TrainedModel load_model(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("corrupt model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace mamprop
