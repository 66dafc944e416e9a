#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mamprop/data.hpp"
#include "mamprop/learners.hpp"

namespace mamprop {

class Rng;

using ParamValue = std::variant<std::int64_t, double, std::string>;
using ParamSet = std::map<std::string, ParamValue>;

struct IntUniform {
  std::int64_t lo = 0;
  std::int64_t hi = 1;
};
struct FloatLogUniform {
  double lo = 1e-3;
  double hi = 1.0;
};
struct FloatUniform {
  double lo = 0.0;
  double hi = 1.0;
};
struct Categorical {
  std::vector<ParamValue> levels;
};
using Domain = std::variant<IntUniform, FloatLogUniform, FloatUniform, Categorical>;

/// A parameter that only exists while `parent` takes the value `level`.
struct Condition {
  std::string parent;
  ParamValue level;
};

struct ParamSpec {
  std::string name;
  Domain domain;
  std::optional<Condition> condition;
};

class SearchSpace {
 public:
  /// Throws ValidationError for lo >= hi, an empty level list, a duplicate name, or a
  /// condition whose parent is not an earlier categorical containing the level.
  SearchSpace& add(std::string name, Domain domain, std::optional<Condition> condition = {});

  const std::vector<ParamSpec>& params() const { return params_; }
  const ParamSpec* find(const std::string& name) const;
  /// Whether `spec` is active given the values chosen so far.
  bool active(const ParamSpec& spec, const ParamSet& chosen) const;
  bool contains(const ParamSet& set) const;

  nlohmann::json to_json() const;

 private:
  std::vector<ParamSpec> params_;
};

ParamSet sample_prior(const SearchSpace& space, Rng& rng);

struct Trial {
  std::size_t index = 0;
  ParamSet params;
  std::optional<double> objective;  ///< empty for failed trials
  std::string message;              ///< failure reason
};

struct TrialHistory {
  std::vector<Trial> trials;
  std::optional<std::size_t> best;  ///< index of the best completed trial

  void append(Trial t);
  const Trial* best_trial() const { return best ? &trials[*best] : nullptr; }
  nlohmann::json to_json() const;
};

/// Maximized. Exceptions derived from mamprop::Error mark the trial as failed.
using Objective = std::function<double(const ParamSet&)>;

/// Cartesian product over discretized domains with the first parameter varying
/// slowest. Numeric domains get `resolution` evenly spaced points (log-spaced for
/// log-uniform, deduplicated after rounding for integers); categoricals use all levels.
TrialHistory grid_search(const SearchSpace& space, const Objective& objective,
                         std::size_t resolution);
std::vector<ParamSet> grid_points(const SearchSpace& space, std::size_t resolution);

TrialHistory random_search(const SearchSpace& space, const Objective& objective,
                           std::size_t n_trials, std::uint64_t seed);

struct TpeOptions {
  double gamma = 0.25;
  std::size_t n_candidates = 24;
  std::size_t n_startup = 10;
};

TrialHistory tpe_search(const SearchSpace& space, const Objective& objective, std::size_t n_trials,
                        std::uint64_t seed, const TpeOptions& opts = {});

/// Search space of the benchmark for a task and model family (rf, gb, svr, mlp).
/// Throws ValidationError for pairs the benchmark did not tune.
SearchSpace builtin_space(LabelKind task, const std::string& family);

/// Optimum reported by the benchmark for a task and family.
std::optional<ParamSet> reference_optimum(LabelKind task, const std::string& family);

/// Learner configuration for a family with the given parameters applied on top of
/// `base`. Unknown names raise ValidationError.
LearnerConfig apply_params(const LearnerConfig& base, const ParamSet& params);
/// Default learner for a tuning family.
LearnerConfig family_config(const std::string& family);

nlohmann::json param_value_to_json(const ParamValue& v);
ParamValue param_value_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ParamSet& p);
ParamSet params_from_json(const nlohmann::json& j);
std::string to_string(const ParamValue& v);

}  // namespace mamprop
