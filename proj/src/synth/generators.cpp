#include <algorithm>
#include <cmath>
#include <numeric>

#include "mamprop/eqdiscovery.hpp"
#include "mamprop/error.hpp"
#include "mamprop/rng.hpp"
#include "mamprop/synth.hpp"

namespace mamprop {
namespace {

struct ProcessParams {
  double p, v, l, b;  // W, mm/s, um, um
};

// SI vector in QuantityTable::standard order.
std::vector<double> si_row(const MaterialSpec& m, const ProcessParams& q, double t0) {
  return {q.p, q.v * 1e-3, q.l * 1e-6, q.b * 1e-6, *m.density * 1e3, *m.specific_heat,
          *m.cte * 1e-6, *m.thermal_conductivity, *m.melting_point - t0};
}

double law_value(const SyntheticLaw& law, const std::vector<double>& si) {
  double log_y = std::log(law.w0);
  for (std::size_t i = 0; i < si.size(); ++i) log_y += law.exponents[i] * std::log(si[i]);
  return std::exp(log_y);
}

std::vector<const MaterialSpec*> pool_specs(const MaterialRegistry& registry) {
  std::vector<const MaterialSpec*> out;
  for (const auto& name : synthetic_material_pool()) {
    const MaterialSpec* m = registry.find(name);
    if (!m) throw ValidationError("synthetic material pool needs '" + name + "' in the registry");
    if (!m->has_thermal_properties())
      throw ValidationError("synthetic material '" + name + "' lacks thermal properties");
    out.push_back(m);
  }
  return out;
}

// Dividing by a power of ten gives the double nearest to the decimal value.
double round_to(double v, double step) {
  const double inv = std::round(1.0 / step);
  return std::round(v * inv) / inv;
}

ProcessParams lpbf_params(Rng& rng) {
  return {round_to(rng.uniform(100, 400), 1), round_to(rng.uniform(400, 1600), 1),
          round_to(rng.uniform(20, 60), 1), round_to(rng.uniform(50, 120), 1)};
}

DataRecord base_record(const std::string& material, const ProcessParams& q) {
  DataRecord r;
  r.material = material;
  r.process = Process::pbf;
  r.subprocess = Subprocess::l_pbf;
  r.machine = "EOS M290";
  r.orientation = Orientation::horizontal;
  r.beam_power = q.p;
  r.scan_speed = q.v;
  r.layer_thickness = q.l;
  r.beam_diameter = q.b;
  r.source = "synthetic";
  return r;
}

struct SubprocessProfile {
  Subprocess sub;
  double weight;
  std::vector<std::string> machines;
  double p_lo, p_hi, v_lo, v_hi, l_lo, l_hi, b_lo, b_hi;
};

const std::vector<SubprocessProfile>& profiles() {
  static const std::vector<SubprocessProfile> p = {
      {Subprocess::l_pbf, 0.74,
       {"EOS M290", "EOS M4OO SF", "SLM 280", "Renishaw AM400", "Concept Laser M2", "3D Systems ProX 320"},
       100, 400, 400, 1600, 20, 60, 50, 120},
      {Subprocess::e_pbf, 0.10, {"Arcam A2X", "Arcam Q20"}, 600, 3000, 500, 4500, 50, 90, 200, 400},
      {Subprocess::l_ded, 0.10, {"Optomec LENS 850-R", "Trumpf TruLaser 3D"}, 300, 2000, 5, 20, 200, 800, 600, 2000},
      {Subprocess::arc_ded, 0.04, {"Custom WAAM cell"}, 2000, 6000, 5, 15, 1000, 2000, 3000, 6000},
      {Subprocess::wire_l_ded, 0.02, {"Meltio M450"}, 500, 1500, 5, 15, 500, 1000, 800, 1500},
  };
  return p;
}

template <class T>
const T& pick_weighted(Rng& rng, const std::vector<T>& items, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (u < weights[i]) return items[i];
    u -= weights[i];
  }
  return items.back();
}

// Exactly `count` of `n` indices, chosen without replacement, sorted.
std::vector<std::size_t> choose(Rng& rng, std::size_t n, std::size_t count) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx);
  idx.resize(std::min(count, n));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

const std::vector<std::string>& synthetic_material_pool() {
  static const std::vector<std::string> pool = {
      "Ti6Al4V",     "IN718",          "SS316L",   "AlSi10Mg",   "IN625",
      "Maraging steel M300", "Ti6Al4V ELI", "SS17-4PH", "CoCrMo",     "H13 Tool Steel",
      "AlSi7Mg0.6",  "SS15-5PH",       "CuCrZr",   "Hastelloy X", "SS304L",
      "Ti grade 2",  "K500",           "IN690",    "AlSi12",     "Nb"};
  return pool;
}

SyntheticLaw as_built_ys_law(const MaterialRegistry& registry) {
  SyntheticLaw law;
  law.exponents = {0.07, -0.05, -0.18, -0.08, 0.82, 0.75, -0.94, 0.11, -0.29};
  law.w0 = 1.0;
  std::vector<double> values;
  for (const MaterialSpec* m : pool_specs(registry))
    values.push_back(law_value(law, si_row(*m, {250, 1000, 40, 85}, law.t0)));
  std::sort(values.begin(), values.end());
  const double median = values.size() % 2 ? values[values.size() / 2]
                                          : 0.5 * (values[values.size() / 2 - 1] + values[values.size() / 2]);
  law.w0 = 900e6 / median;
  return law;
}

Dataset generate_powerlaw_benchmark(std::shared_ptr<const MaterialRegistry> registry,
                                    const PowerLawBenchmarkOptions& opts) {
  if (!registry) throw ValidationError("synthetic data needs a material registry");
  const auto specs = pool_specs(*registry);
  const SyntheticLaw law = as_built_ys_law(*registry);
  Rng rng(derive_seed(opts.seed, {0x706c62}));
  Dataset ds;
  ds.registry = registry;
  for (std::size_t i = 0; i < opts.n_records; ++i) {
    const MaterialSpec& m = *specs[rng.below(specs.size())];
    const ProcessParams q = lpbf_params(rng);
    DataRecord r = base_record(m.name, q);
    const double ys = law_value(law, si_row(m, q, law.t0)) * (1.0 + opts.noise * rng.normal()) / 1e6;
    r.label(LabelKind::ys) = round_to(ys, 0.01);
    ds.records.push_back(std::move(r));
  }
  return ds;
}

Dataset generate_benchmark(std::shared_ptr<const MaterialRegistry> registry, const BenchmarkOptions& opts) {
  if (!registry) throw ValidationError("synthetic data needs a material registry");
  const auto specs = pool_specs(*registry);
  const SyntheticLaw law = as_built_ys_law(*registry);
  const std::size_t n = opts.n_records;
  Rng rng(derive_seed(opts.seed, {0x62656e}));

  std::vector<double> sub_weights;
  for (const auto& p : profiles()) sub_weights.push_back(p.weight);
  const std::vector<PostProcessing::Kind> post_levels = {PostProcessing::Kind::as_built, PostProcessing::Kind::ht,
                                                         PostProcessing::Kind::hip, PostProcessing::Kind::sr};
  const std::vector<double> post_weights = {0.55, 0.25, 0.12, 0.08};
  const std::vector<Orientation> orientations = {Orientation::horizontal, Orientation::vertical,
                                                 Orientation::deg45};
  const std::vector<double> orient_weights = {0.45, 0.45, 0.10};
  const std::vector<SurfaceCondition> surfaces = {SurfaceCondition::as_built, SurfaceCondition::bead_blasted,
                                                  SurfaceCondition::shot_peened,
                                                  SurfaceCondition::corundum_blasted};

  // Label coverage: YS on the first rows, UTS on every row without YS plus a random
  // share of the rest, the others anywhere. Counts follow the literature sample.
  auto scaled = [&](std::size_t c) { return static_cast<std::size_t>(std::llround(double(c) * double(n) / 1600.0)); };
  const std::size_t n_ys = scaled(1218);
  std::vector<std::vector<bool>> has(kLabelCount, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n_ys && i < n; ++i) has[0][i] = true;
  {
    const std::size_t n_uts = scaled(1244);
    std::size_t filled = 0;
    for (std::size_t i = n_ys; i < n; ++i, ++filled) has[1][i] = true;
    if (n_uts > filled)
      for (std::size_t i : choose(rng, n_ys, n_uts - filled)) has[1][i] = true;
  }
  const std::size_t counts[] = {432, 1198, 293, 230, 218};
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t i : choose(rng, n, scaled(counts[k]))) has[k + 2][i] = true;

  Dataset ds;
  ds.registry = registry;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prof = pick_weighted(rng, profiles(), sub_weights);
    const MaterialSpec* m = specs[rng.below(specs.size())];
    ProcessParams q{round_to(rng.uniform(prof.p_lo, prof.p_hi), 1), round_to(rng.uniform(prof.v_lo, prof.v_hi), 1),
                    round_to(rng.uniform(prof.l_lo, prof.l_hi), 1), round_to(rng.uniform(prof.b_lo, prof.b_hi), 1)};
    DataRecord r = base_record(m->name, q);
    r.subprocess = prof.sub;
    r.process = process_of(prof.sub);
    r.machine = prof.machines[rng.below(prof.machines.size())];
    r.orientation = pick_weighted(rng, orientations, orient_weights);
    r.post_processing.kind = pick_weighted(rng, post_levels, post_weights);
    if (i == 299) {
      m = registry->find("Ti6Al4V ELI");
      q = {1000, 1200, 30, 100};
      r = base_record(m->name, q);
      r.machine = "EOS M4OO SF";
    }

    double ys_factor = 1.0, el_factor = 1.0;
    switch (r.post_processing.kind) {
      case PostProcessing::Kind::ht: ys_factor = 0.92, el_factor = 1.4; break;
      case PostProcessing::Kind::hip: ys_factor = 0.85, el_factor = 1.6; break;
      case PostProcessing::Kind::sr: ys_factor = 0.95, el_factor = 1.15; break;
      default: break;
    }
    if (r.orientation == Orientation::vertical) ys_factor *= 0.96, el_factor *= 0.85;
    if (r.orientation == Orientation::deg45) ys_factor *= 0.98, el_factor *= 0.93;

    const double ys = law_value(law, si_row(*m, q, law.t0)) / 1e6 * ys_factor * (1.0 + 0.02 * rng.normal());
    const double uts = ys * (1.05 + 0.012 * *m->cte) * (1.0 + 0.02 * rng.normal());
    const double tm_k = *m->melting_point + 273.15;
    const double e_mod = 30.0 * std::pow(*m->density, 0.8) * std::pow(tm_k / 1700.0, 0.8) *
                         (r.process == Process::ded ? 0.97 : 1.0) * (1.0 + 0.03 * rng.normal());
    const double elong = std::clamp(40.0 - 0.025 * ys, 2.0, 60.0) * el_factor * (1.0 + 0.05 * rng.normal());
    const double hv = uts / 3.1 * (1.0 + 0.02 * rng.normal());
    const double hrc = std::clamp((hv - 220.0) / 7.8 + 20.0, 5.0, 70.0) * (1.0 + 0.02 * rng.normal());
    double rz = (4.0 + 0.45 * std::pow(q.l, 0.9) * std::pow(q.v / 1000.0, 0.1) * std::pow(q.p / 200.0, -0.1)) *
                (1.0 + 0.04 * rng.normal());
    if (has[6][i]) {
      const SurfaceCondition s = i == 299 ? SurfaceCondition::as_built : surfaces[rng.below(surfaces.size())];
      static const double surface_factor[] = {1.0, 0.6, 0.5, 0.55};
      rz *= surface_factor[static_cast<std::size_t>(s)];
      r.surface_condition = s;
    }
    const double values[] = {ys, uts, e_mod, elong, hv, hrc, rz};
    const double steps[] = {0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.01};
    for (std::size_t k = 0; k < kLabelCount; ++k)
      if (has[k][i]) r.labels[k] = std::max(round_to(values[k], steps[k]), steps[k]);
    ds.records.push_back(std::move(r));
  }
  return ds;
}

OracleData generate_oracle(const MaterialRegistry& registry, std::size_t n_rows, std::size_t n_materials,
                           double noise, std::uint64_t seed, double t0) {
  const auto specs = pool_specs(registry);
  if (n_materials == 0 || n_materials > specs.size())
    throw ValidationError("oracle needs between 1 and " + std::to_string(specs.size()) + " materials");
  Rng rng(derive_seed(seed, {0x6f7263}));
  OracleData out;
  out.x.resize(static_cast<Eigen::Index>(n_rows), 9);
  out.y.resize(static_cast<Eigen::Index>(n_rows));
  for (std::size_t i = 0; i < n_rows; ++i) {
    // Round-robin keeps every material represented.
    const MaterialSpec& m = *specs[i % n_materials];
    const auto row = si_row(m, lpbf_params(rng), t0);
    for (std::size_t j = 0; j < 9; ++j) out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    out.y(static_cast<Eigen::Index>(i)) = 2.0 * row[4] * row[5] * row[8] * (1.0 + noise * rng.normal());
    out.materials.push_back(m.name);
  }
  return out;
}

Dataset oracle_dataset(std::shared_ptr<const MaterialRegistry> registry, std::size_t n_rows,
                       std::size_t n_materials, double noise, std::uint64_t seed, double t0) {
  if (!registry) throw ValidationError("synthetic data needs a material registry");
  const OracleData o = generate_oracle(*registry, n_rows, n_materials, noise, seed, t0);
  Dataset ds;
  ds.registry = registry;
  for (std::size_t i = 0; i < n_rows; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    DataRecord rec = base_record(o.materials[i], {o.x(r, 0), o.x(r, 1) * 1e3, o.x(r, 2) * 1e6, o.x(r, 3) * 1e6});
    rec.label(LabelKind::ys) = o.y(r) / 1e6;
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

}  // namespace mamprop
