#include <cmath>
#include <set>

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

std::vector<ParamValue> discretize(const Domain& d, std::size_t resolution) {
  std::vector<ParamValue> out;
  const std::size_t r = std::max<std::size_t>(resolution, 1);
  auto at = [&](std::size_t i) { return r == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(r - 1); };
  std::visit(overloaded{
                 [&](const IntUniform& u) {
                   std::set<std::int64_t> seen;
                   for (std::size_t i = 0; i < r; ++i) {
                     const auto v = static_cast<std::int64_t>(
                         std::llround(static_cast<double>(u.lo) + at(i) * static_cast<double>(u.hi - u.lo)));
                     if (seen.insert(v).second) out.emplace_back(v);
                   }
                 },
                 [&](const FloatLogUniform& u) {
                   const double a = std::log(u.lo), b = std::log(u.hi);
                   for (std::size_t i = 0; i < r; ++i) {
                     out.emplace_back(i == 0 && r > 1 ? u.lo : (i + 1 == r && r > 1 ? u.hi : std::exp(a + at(i) * (b - a))));
                   }
                 },
                 [&](const FloatUniform& u) {
                   for (std::size_t i = 0; i < r; ++i) out.emplace_back(u.lo + at(i) * (u.hi - u.lo));
                 },
                 [&](const Categorical& c) { out = c.levels; },
             },
             d);
  return out;
}

void expand(const SearchSpace& space, std::size_t resolution, std::size_t depth, ParamSet& current,
            std::vector<ParamSet>& out) {
  const auto& params = space.params();
  if (depth == params.size()) {
    out.push_back(current);
    return;
  }
  const ParamSpec& spec = params[depth];
  if (!space.active(spec, current)) {
    expand(space, resolution, depth + 1, current, out);
    return;
  }
  for (const auto& v : discretize(spec.domain, resolution)) {
    current[spec.name] = v;
    expand(space, resolution, depth + 1, current, out);
  }
  current.erase(spec.name);
}

Trial evaluate(const Objective& objective, ParamSet params) {
  Trial t;
  t.params = std::move(params);
  try {
    const double v = objective(t.params);
    if (std::isfinite(v)) {
      t.objective = v;
    } else {
      t.message = "objective is not finite";
    }
  } catch (const Error& e) {
    t.message = std::string(error_code(e.kind())) + ": " + e.what();
  }
  return t;
}

}  // namespace

std::vector<ParamSet> grid_points(const SearchSpace& space, std::size_t resolution) {
  std::vector<ParamSet> out;
  ParamSet current;
  expand(space, resolution, 0, current, out);
  return out;
}

TrialHistory grid_search(const SearchSpace& space, const Objective& objective,
                         std::size_t resolution) {
  const auto points = grid_points(space, resolution);
  if (space.params().empty() || points.empty()) throw ValidationError("empty search grid");
  TrialHistory h;
  for (const auto& p : points) h.append(evaluate(objective, p));
  return h;
}

TrialHistory random_search(const SearchSpace& space, const Objective& objective,
                           std::size_t n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw ValidationError("random search needs at least one trial");
  TrialHistory h;
  for (std::size_t i = 0; i < n_trials; ++i) {
    Rng rng(derive_seed(seed, {0x726e64u, i}));
    h.append(evaluate(objective, sample_prior(space, rng)));
  }
  return h;
}

namespace detail {
Trial evaluate_trial(const Objective& objective, ParamSet params) {
  return evaluate(objective, std::move(params));
}
}  // namespace detail

}  // namespace mamprop
