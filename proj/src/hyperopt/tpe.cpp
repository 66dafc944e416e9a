#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mamprop/error.hpp"
#include "mamprop/hyperopt.hpp"
#include "mamprop/rng.hpp"

namespace mamprop {

namespace detail {
Trial evaluate_trial(const Objective& objective, ParamSet params);
}

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Numeric domains live on a continuous axis: integers as-is (cells of width 1),
/// log-uniform in log space.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  enum class Kind { integer, log, linear } kind = Kind::linear;
};

std::optional<Axis> axis_of(const Domain& d) {
  if (const auto* u = std::get_if<IntUniform>(&d)) {
    return Axis{static_cast<double>(u->lo) - 0.5, static_cast<double>(u->hi) + 0.5, Axis::Kind::integer};
  }
  if (const auto* u = std::get_if<FloatLogUniform>(&d)) {
    return Axis{std::log(u->lo), std::log(u->hi), Axis::Kind::log};
  }
  if (const auto* u = std::get_if<FloatUniform>(&d)) return Axis{u->lo, u->hi, Axis::Kind::linear};
  return std::nullopt;
}

double to_axis(const Axis& a, const ParamValue& v) {
  switch (a.kind) {
    case Axis::Kind::integer: return static_cast<double>(std::get<std::int64_t>(v));
    case Axis::Kind::log: return std::log(std::get<double>(v));
    case Axis::Kind::linear: return std::get<double>(v);
  }
  return 0.0;
}

ParamValue from_axis(const Axis& a, const Domain& d, double t) {
  switch (a.kind) {
    case Axis::Kind::integer: {
      const auto& u = std::get<IntUniform>(d);
      return std::clamp(static_cast<std::int64_t>(std::llround(t)), u.lo, u.hi);
    }
    case Axis::Kind::log: {
      const auto& u = std::get<FloatLogUniform>(d);
      return std::clamp(std::exp(t), u.lo, u.hi);
    }
    case Axis::Kind::linear: {
      const auto& u = std::get<FloatUniform>(d);
      return std::clamp(t, u.lo, u.hi);
    }
  }
  return 0.0;
}

/// Uniform prior plus one truncated Gaussian per observation, equal weights.
struct Parzen {
  Axis axis;
  std::vector<double> mu;
  std::vector<double> mass;  // truncation normalizer per component
  double bw = 1.0;

  Parzen(const Axis& a, std::vector<double> obs) : axis(a), mu(std::move(obs)) {
    const double width = axis.hi - axis.lo;
    const auto n = static_cast<double>(mu.size());
    double sigma = width;
    if (mu.size() >= 2) {
      const double m = std::accumulate(mu.begin(), mu.end(), 0.0) / n;
      double s = 0.0;
      for (double v : mu) s += (v - m) * (v - m);
      sigma = std::sqrt(s / n);
    }
    bw = mu.empty() ? width : sigma * std::pow(n, -0.2);
    bw = std::clamp(bw, 0.01 * width, width);
    for (double m : mu) mass.push_back(normal_cdf((axis.hi - m) / bw) - normal_cdf((axis.lo - m) / bw));
  }

  double density(double t) const {
    double acc = 1.0 / (axis.hi - axis.lo);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double z = (t - mu[i]) / bw;
      acc += kInvSqrt2Pi * std::exp(-0.5 * z * z) / bw / mass[i];
    }
    return acc / static_cast<double>(mu.size() + 1);
  }

  double sample(Rng& rng) const {
    const std::size_t k = rng.below(mu.size() + 1);
    if (k == mu.size()) return rng.uniform(axis.lo, axis.hi);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double t = mu[k] + bw * rng.normal();
      if (t >= axis.lo && t <= axis.hi) return t;
    }
    return std::clamp(mu[k], axis.lo, axis.hi);
  }
};

std::vector<double> category_weights(const Categorical& c, const std::vector<ParamValue>& obs) {
  std::vector<double> w(c.levels.size(), 1.0);
  for (const auto& v : obs) {
    auto it = std::find(c.levels.begin(), c.levels.end(), v);
    if (it != c.levels.end()) w[static_cast<std::size_t>(it - c.levels.begin())] += 1.0;
  }
  const double total = static_cast<double>(obs.size() + c.levels.size());
  for (auto& x : w) x /= total;
  return w;
}

std::vector<ParamValue> observations(const std::vector<const Trial*>& trials, const std::string& name) {
  std::vector<ParamValue> out;
  for (const Trial* t : trials) {
    auto it = t->params.find(name);
    if (it != t->params.end()) out.push_back(it->second);
  }
  return out;
}

ParamSet propose(const SearchSpace& space, const TrialHistory& history, Rng& rng,
                 const TpeOptions& opts) {
  std::vector<const Trial*> done;
  for (const auto& t : history.trials) {
    if (t.objective) done.push_back(&t);
  }
  if (done.size() < 2) return sample_prior(space, rng);
  std::stable_sort(done.begin(), done.end(),
                   [](const Trial* a, const Trial* b) { return *a->objective > *b->objective; });
  std::size_t n_good = static_cast<std::size_t>(std::ceil(opts.gamma * static_cast<double>(done.size())));
  n_good = std::clamp<std::size_t>(n_good, 1, done.size() - 1);
  const std::vector<const Trial*> good(done.begin(), done.begin() + static_cast<std::ptrdiff_t>(n_good));
  const std::vector<const Trial*> bad(done.begin() + static_cast<std::ptrdiff_t>(n_good), done.end());

  ParamSet best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < std::max<std::size_t>(1, opts.n_candidates); ++c) {
    ParamSet cand;
    double score = 0.0;
    for (const auto& spec : space.params()) {
      if (!space.active(spec, cand)) continue;
      const auto lo = observations(good, spec.name);
      const auto go = observations(bad, spec.name);
      if (const auto* cat = std::get_if<Categorical>(&spec.domain)) {
        const auto wl = category_weights(*cat, lo);
        const auto wg = category_weights(*cat, go);
        double u = rng.uniform();
        std::size_t k = 0;
        while (k + 1 < wl.size() && u >= wl[k]) u -= wl[k++];
        cand[spec.name] = cat->levels[k];
        score += std::log(wl[k]) - std::log(wg[k]);
      } else {
        const Axis axis = *axis_of(spec.domain);
        std::vector<double> tl, tg;
        for (const auto& v : lo) tl.push_back(to_axis(axis, v));
        for (const auto& v : go) tg.push_back(to_axis(axis, v));
        const Parzen l(axis, tl), g(axis, tg);
        const ParamValue v = from_axis(axis, spec.domain, l.sample(rng));
        const double t = to_axis(axis, v);
        cand[spec.name] = v;
        score += std::log(l.density(t)) - std::log(g.density(t));
      }
    }
    if (score > best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace

TrialHistory tpe_search(const SearchSpace& space, const Objective& objective, std::size_t n_trials,
                        std::uint64_t seed, const TpeOptions& opts) {
  if (n_trials <= opts.n_startup) {
    throw ValidationError("TPE needs more trials (" + std::to_string(n_trials) +
                          ") than startup trials (" + std::to_string(opts.n_startup) + ")");
  }
  if (!(opts.gamma > 0.0 && opts.gamma < 1.0)) throw ValidationError("TPE gamma must lie in (0, 1)");
  TrialHistory h;
  for (std::size_t i = 0; i < n_trials; ++i) {
    Rng rng(derive_seed(seed, {0x747065u, i}));
    ParamSet p = i < opts.n_startup ? sample_prior(space, rng) : propose(space, h, rng, opts);
    h.append(detail::evaluate_trial(objective, std::move(p)));
  }
  return h;
}

}  // namespace mamprop
