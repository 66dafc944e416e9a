#include <algorithm>
#include <cmath>

#include "mamprop/csv.hpp"
#include "mamprop/error.hpp"
#include "mamprop/hyperopt.hpp"
#include "mamprop/rng.hpp"

namespace mamprop {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool in_domain(const Domain& d, const ParamValue& v) {
  return std::visit(
      overloaded{
          [&](const IntUniform& u) {
            const auto* i = std::get_if<std::int64_t>(&v);
            return i && *i >= u.lo && *i <= u.hi;
          },
          [&](const FloatLogUniform& u) {
            const auto* x = std::get_if<double>(&v);
            return x && *x >= u.lo && *x <= u.hi;
          },
          [&](const FloatUniform& u) {
            const auto* x = std::get_if<double>(&v);
            return x && *x >= u.lo && *x <= u.hi;
          },
          [&](const Categorical& c) {
            return std::find(c.levels.begin(), c.levels.end(), v) != c.levels.end();
          },
      },
      d);
}

nlohmann::json domain_to_json(const Domain& d) {
  return std::visit(
      overloaded{
          [](const IntUniform& u) { return nlohmann::json{{"kind", "int_uniform"}, {"lo", u.lo}, {"hi", u.hi}}; },
          [](const FloatLogUniform& u) {
            return nlohmann::json{{"kind", "float_loguniform"}, {"lo", u.lo}, {"hi", u.hi}};
          },
          [](const FloatUniform& u) {
            return nlohmann::json{{"kind", "float_uniform"}, {"lo", u.lo}, {"hi", u.hi}};
          },
          [](const Categorical& c) {
            nlohmann::json levels = nlohmann::json::array();
            for (const auto& l : c.levels) levels.push_back(param_value_to_json(l));
            return nlohmann::json{{"kind", "categorical"}, {"levels", levels}};
          },
      },
      d);
}

}  // namespace

SearchSpace& SearchSpace::add(std::string name, Domain domain, std::optional<Condition> condition) {
  if (find(name)) throw ValidationError("duplicate search parameter '" + name + "'");
  std::visit(overloaded{
                 [&](const IntUniform& u) {
                   if (u.lo >= u.hi) throw ValidationError("parameter '" + name + "' needs lo < hi");
                 },
                 [&](const FloatLogUniform& u) {
                   if (!(u.lo > 0.0) || !(u.lo < u.hi)) {
                     throw ValidationError("parameter '" + name + "' needs 0 < lo < hi");
                   }
                 },
                 [&](const FloatUniform& u) {
                   if (!(u.lo < u.hi)) throw ValidationError("parameter '" + name + "' needs lo < hi");
                 },
                 [&](const Categorical& c) {
                   if (c.levels.empty()) throw ValidationError("parameter '" + name + "' has no levels");
                 },
             },
             domain);
  if (condition) {
    const ParamSpec* parent = find(condition->parent);
    const auto* cat = parent ? std::get_if<Categorical>(&parent->domain) : nullptr;
    if (!cat || !in_domain(parent->domain, condition->level)) {
      throw ValidationError("parameter '" + name + "' depends on unknown level of '" +
                            condition->parent + "'");
    }
  }
  params_.push_back({std::move(name), std::move(domain), std::move(condition)});
  return *this;
}

const ParamSpec* SearchSpace::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

bool SearchSpace::active(const ParamSpec& spec, const ParamSet& chosen) const {
  if (!spec.condition) return true;
  auto it = chosen.find(spec.condition->parent);
  return it != chosen.end() && it->second == spec.condition->level;
}

bool SearchSpace::contains(const ParamSet& set) const {
  for (const auto& spec : params_) {
    auto it = set.find(spec.name);
    const bool on = active(spec, set);
    if (on != (it != set.end())) return false;
    if (on && !in_domain(spec.domain, it->second)) return false;
  }
  return std::all_of(set.begin(), set.end(), [&](const auto& kv) { return find(kv.first) != nullptr; });
}

nlohmann::json SearchSpace::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : params_) {
    nlohmann::json j{{"name", p.name}, {"domain", domain_to_json(p.domain)}};
    if (p.condition) {
      j["condition"] = {{"parent", p.condition->parent},
                        {"level", param_value_to_json(p.condition->level)}};
    }
    out.push_back(j);
  }
  return out;
}

ParamSet sample_prior(const SearchSpace& space, Rng& rng) {
  ParamSet out;
  for (const auto& spec : space.params()) {
    if (!space.active(spec, out)) continue;
    out[spec.name] = std::visit(
        overloaded{
            [&](const IntUniform& u) -> ParamValue {
              return u.lo + static_cast<std::int64_t>(rng.below(static_cast<std::size_t>(u.hi - u.lo + 1)));
            },
            [&](const FloatLogUniform& u) -> ParamValue {
              return std::exp(rng.uniform(std::log(u.lo), std::log(u.hi)));
            },
            [&](const FloatUniform& u) -> ParamValue { return rng.uniform(u.lo, u.hi); },
            [&](const Categorical& c) -> ParamValue { return c.levels[rng.below(c.levels.size())]; },
        },
        spec.domain);
  }
  return out;
}

void TrialHistory::append(Trial t) {
  t.index = trials.size();
  trials.push_back(std::move(t));
  const Trial& added = trials.back();
  if (added.objective && (!best || *added.objective > *trials[*best].objective)) best = added.index;
}

nlohmann::json TrialHistory::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& t : trials) {
    nlohmann::json j{{"index", t.index}, {"params", params_to_json(t.params)}};
    if (t.objective) {
      j["status"] = "ok";
      j["objective"] = *t.objective;
    } else {
      j["status"] = "failed";
      j["message"] = t.message;
    }
    list.push_back(j);
  }
  nlohmann::json out{{"trials", list}};
  if (const Trial* b = best_trial()) {
    out["best"] = {{"index", b->index}, {"objective", *b->objective}, {"params", params_to_json(b->params)}};
  } else {
    out["best"] = nullptr;
  }
  return out;
}

nlohmann::json param_value_to_json(const ParamValue& v) {
  return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

ParamValue param_value_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw SchemaError("parameter values must be numbers or strings");
}

nlohmann::json params_to_json(const ParamSet& p) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : p) out[k] = param_value_to_json(v);
  return out;
}

ParamSet params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("parameter set must be a JSON object");
  ParamSet out;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = param_value_from_json(it.value());
  return out;
}

std::string to_string(const ParamValue& v) {
  return std::visit(overloaded{
                        [](std::int64_t i) { return std::to_string(i); },
                        [](double d) { return format_number(d); },
                        [](const std::string& s) { return s; },
                    },
                    v);
}

}  // namespace mamprop
