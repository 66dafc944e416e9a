#include <algorithm>
#include <map>
#include <set>

#include "mamprop/error.hpp"
#include "mamprop/features.hpp"

namespace mamprop {

namespace {

struct NumericSpec {
  const char* name;
  const char* unit;
  RequiredField field;
};

constexpr NumericSpec kBaselineNumeric[] = {
    {"beam_power", "W", RequiredField::beam_power},
    {"layer_thickness", "um", RequiredField::layer_thickness},
    {"density", "g/cm3", RequiredField::density},
    {"melting_point", "degC", RequiredField::melting_point},
    {"thermal_conductivity", "W/(m K)", RequiredField::thermal_conductivity},
    {"specific_heat", "J/(kg K)", RequiredField::specific_heat},
    {"cte", "1e-6/K", RequiredField::cte},
};

std::optional<double> numeric_value(const Dataset& ds, const DataRecord& r, const std::string& key) {
  if (key == "beam_power") return r.beam_power;
  if (key == "scan_speed") return r.scan_speed;
  if (key == "layer_thickness") return r.layer_thickness;
  if (key == "beam_diameter") return r.beam_diameter;
  const MaterialSpec& m = ds.material_of(r);
  if (key == "density") return m.density;
  if (key == "melting_point") return m.melting_point;
  if (key == "thermal_conductivity") return m.thermal_conductivity;
  if (key == "specific_heat") return m.specific_heat;
  if (key == "cte") return m.cte;
  throw SchemaError("unknown numeric feature '" + key + "'");
}

std::string level_of(const DataRecord& r, const std::string& group) {
  if (group == "material") return r.material;
  if (group == "machine") return r.machine;
  if (group == "orientation") return std::string(to_string(r.orientation));
  if (group == "post_processing") return r.post_processing.label();
  if (group == "process") return std::string(to_string(r.process));
  if (group == "subprocess") return std::string(to_string(r.subprocess));
  throw SchemaError("unknown one-hot group '" + group + "'");
}

void add_group(std::vector<FeatureColumn>& cols, const std::string& group,
               std::set<std::string> levels) {
  for (const auto& level : levels) {
    cols.push_back({ColumnOrigin::one_hot, group + "=" + level, group, level, levels.size()});
  }
}

std::vector<FeatureColumn> composition_columns(const MaterialRegistry& reg) {
  std::vector<FeatureColumn> cols;
  for (const auto& el : reg.used_elements()) {
    cols.push_back({ColumnOrigin::composition, "wt%_" + el, el, "wt%", 1});
  }
  return cols;
}

std::vector<FeatureColumn> elemental_columns() {
  std::vector<FeatureColumn> cols;
  for (auto p : kElementalProperties) {
    cols.push_back({ColumnOrigin::elemental, "mix_" + std::string(p), std::string(p), "", 1});
  }
  return cols;
}

double mixture_value(const MaterialSpec& m, const ElementTable& elements, const std::string& prop) {
  const double total = m.composition_total();
  if (total <= 0.0) throw ValidationError("material '" + m.name + "' has no composition");
  double acc = 0.0;
  for (const auto& [el, wt] : m.composition) {
    if (wt <= 0.0) continue;
    const ElementProperties* e = elements.find(el);
    if (!e) {
      throw SchemaError("element '" + el + "' used by material '" + m.name +
                        "' is missing from the element table");
    }
    acc += (wt / total) * elemental_property(*e, prop);
  }
  return acc;
}

std::string describe(const DataRecord& r, std::size_t i) {
  return "record " + std::to_string(i + 1) + " (" + r.material + ")";
}

FeatureMatrix append(const FeatureMatrix& base, const FeatureMatrix& extra) {
  FeatureMatrix out;
  std::vector<FeatureColumn> cols = base.schema.columns();
  cols.insert(cols.end(), extra.schema.columns().begin(), extra.schema.columns().end());
  out.schema = FeatureSchema(std::move(cols));
  out.values.resize(base.rows(), base.cols() + extra.cols());
  out.values << base.values, extra.values;
  out.row_ids = base.row_ids;
  out.warnings = base.warnings;
  return out;
}

}  // namespace

std::string_view to_string(Featurization f) {
  switch (f) {
    case Featurization::baseline: return "baseline";
    case Featurization::composition: return "composition";
    case Featurization::elemental: return "elemental";
  }
  return "baseline";
}

std::optional<Featurization> parse_featurization(std::string_view s) {
  if (s == "baseline") return Featurization::baseline;
  if (s == "composition" || s == "baseline+composition") return Featurization::composition;
  if (s == "elemental" || s == "baseline+elemental") return Featurization::elemental;
  return std::nullopt;
}

FeatureRequest required_fields(const FeaturizationPlan& plan) {
  FeatureRequest req;
  for (const auto& n : kBaselineNumeric) {
    if (std::find(plan.dropped_groups.begin(), plan.dropped_groups.end(), n.name) ==
        plan.dropped_groups.end()) {
      req.fields.push_back(n.field);
    }
  }
  if (plan.kind != Featurization::baseline) req.fields.push_back(RequiredField::composition);
  return req;
}

FeatureSchema baseline_schema(const Dataset& ds) {
  std::vector<FeatureColumn> cols;
  for (const auto& n : kBaselineNumeric) cols.push_back({ColumnOrigin::numeric, n.name, n.name, n.unit, 1});

  std::set<std::string> materials, machines, post = {"HIP", "HT", "SR", "as_built"};
  if (ds.registry) {
    for (const auto& m : ds.registry->materials()) materials.insert(m.name);
  }
  for (const auto& r : ds.records) {
    materials.insert(r.material);
    machines.insert(r.machine);
    post.insert(r.post_processing.label());
  }
  std::set<std::string> orient, proc, sub;
  for (auto o : {Orientation::horizontal, Orientation::vertical, Orientation::deg45}) {
    orient.insert(std::string(to_string(o)));
  }
  for (auto p : {Process::pbf, Process::ded}) proc.insert(std::string(to_string(p)));
  for (auto s : {Subprocess::l_pbf, Subprocess::e_pbf, Subprocess::l_ded, Subprocess::e_ded,
                 Subprocess::arc_ded, Subprocess::wire_l_ded}) {
    sub.insert(std::string(to_string(s)));
  }
  add_group(cols, "material", materials);
  add_group(cols, "machine", machines);
  add_group(cols, "orientation", orient);
  add_group(cols, "post_processing", post);
  add_group(cols, "process", proc);
  add_group(cols, "subprocess", sub);
  return FeatureSchema(std::move(cols));
}

FeatureMatrix build_features(const Dataset& ds, const FeatureSchema& schema,
                             const ElementTable* elements) {
  const auto n = static_cast<Eigen::Index>(ds.size());
  FeatureMatrix out;
  out.schema = schema;
  out.values = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(schema.size()));
  out.row_ids.resize(ds.size());
  std::set<std::pair<std::string, std::string>> unseen;

  for (std::size_t i = 0; i < ds.size(); ++i) {
    const DataRecord& r = ds.records[i];
    const auto row = static_cast<Eigen::Index>(i);
    out.row_ids[i] = i;
    for (std::size_t j = 0; j < schema.size();) {
      const FeatureColumn& c = schema[j];
      const auto col = static_cast<Eigen::Index>(j);
      switch (c.origin) {
        case ColumnOrigin::numeric: {
          auto v = numeric_value(ds, r, c.key);
          if (!v) throw ValidationError(describe(r, i) + " is missing '" + c.key + "'");
          out.values(row, col) = *v;
          ++j;
          break;
        }
        case ColumnOrigin::one_hot: {
          const std::string level = level_of(r, c.key);
          bool hit = false;
          for (std::size_t k = j; k < j + c.group_size; ++k) {
            if (schema[k].detail == level) {
              out.values(row, static_cast<Eigen::Index>(k)) = 1.0;
              hit = true;
            }
          }
          if (!hit) unseen.emplace(c.key, level);
          j += c.group_size;
          break;
        }
        case ColumnOrigin::composition: {
          const auto& comp = ds.material_of(r).composition;
          auto it = comp.find(c.key);
          out.values(row, col) = it == comp.end() ? 0.0 : it->second;
          ++j;
          break;
        }
        case ColumnOrigin::elemental: {
          if (!elements) throw SchemaError("elemental features need an element table");
          out.values(row, col) = mixture_value(ds.material_of(r), *elements, c.key);
          ++j;
          break;
        }
      }
    }
  }
  for (const auto& [group, level] : unseen) {
    out.warnings.push_back("unseen " + group + " level '" + level + "' encoded as all zeros");
  }
  return out;
}

FeatureMatrix baseline_features(const Dataset& ds) {
  return build_features(ds, baseline_schema(ds));
}

FeatureMatrix composition_features(const Dataset& ds, const FeatureMatrix& base) {
  if (base.rows() != static_cast<Eigen::Index>(ds.size())) {
    throw ValidationError("base features were built from a different dataset");
  }
  FeatureSchema extra(composition_columns(*ds.registry));
  return append(base, build_features(ds, extra));
}

FeatureMatrix elemental_features(const Dataset& ds, const ElementTable& elements,
                                 const FeatureMatrix& base) {
  if (base.rows() != static_cast<Eigen::Index>(ds.size())) {
    throw ValidationError("base features were built from a different dataset");
  }
  FeatureSchema extra(elemental_columns());
  return append(base, build_features(ds, extra, &elements));
}

FeatureSchema plan_schema(const Dataset& ds, const FeaturizationPlan& plan,
                          const ElementTable* elements) {
  std::vector<FeatureColumn> cols = baseline_schema(ds).columns();
  if (plan.kind == Featurization::composition) {
    auto extra = composition_columns(*ds.registry);
    cols.insert(cols.end(), extra.begin(), extra.end());
  } else if (plan.kind == Featurization::elemental) {
    if (!elements) throw SchemaError("elemental featurization needs an element table");
    check_element_coverage(*elements, *ds.registry);
    auto extra = elemental_columns();
    cols.insert(cols.end(), extra.begin(), extra.end());
  }
  FeatureSchema schema(std::move(cols));
  if (!plan.dropped_groups.empty()) schema = schema.without_groups(plan.dropped_groups);
  return schema;
}

FeatureMatrix featurize(const Dataset& ds, const FeaturizationPlan& plan,
                        const ElementTable* elements) {
  return build_features(ds, plan_schema(ds, plan, elements), elements);
}

Eigen::VectorXd label_vector(const Dataset& ds, LabelKind label) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& v = ds.records[i].label(label);
    if (!v) {
      throw ValidationError(describe(ds.records[i], i) + " has no " +
                            std::string(to_string(label)) + " label");
    }
    y(static_cast<Eigen::Index>(i)) = *v;
  }
  return y;
}

}  // namespace mamprop
