#include <algorithm>

#include "mamprop/csv.hpp"
#include "mamprop/data.hpp"
#include "mamprop/error.hpp"
#include "mamprop/io.hpp"

namespace mamprop {

namespace {

constexpr const char* kNumericColumns[] = {"beam_power", "scan_speed", "layer_thickness",
                                           "beam_diameter"};

std::optional<double> DataRecord::*numeric_member(std::size_t i) {
  static std::optional<double> DataRecord::*const members[] = {
      &DataRecord::beam_power, &DataRecord::scan_speed, &DataRecord::layer_thickness,
      &DataRecord::beam_diameter};
  return members[i];
}

}  // namespace

const std::optional<double>& DataRecord::param(NumericParam p) const {
  return this->*numeric_member(static_cast<std::size_t>(p));
}

Dataset parse_dataset(std::string_view csv_text, const std::string& source,
                      std::shared_ptr<const MaterialRegistry> registry,
                      const LoadOptions& opts) {
  if (!registry) throw SchemaError("parse_dataset: material registry required");
  const CsvTable table = parse_csv(csv_text, source);
  Dataset ds;
  ds.registry = registry;
  if (table.header.empty()) return ds;

  auto require = [&](const char* name) {
    const auto c = table.column(name);
    if (!c) throw SchemaError(source + ": missing required column '" + name + "'");
    return *c;
  };
  const std::size_t c_material = require("material");
  const std::size_t c_subprocess = require("subprocess");
  const std::size_t c_machine = require("machine");
  const std::size_t c_orientation = require("orientation");
  const std::size_t c_post = require("post_processing");
  const auto c_process = table.column("process");
  const auto c_surface = table.column("surface_condition");
  const auto c_source = table.column("source");
  std::optional<std::size_t> c_numeric[4];
  for (std::size_t i = 0; i < 4; ++i) c_numeric[i] = table.column(kNumericColumns[i]);
  std::optional<std::size_t> c_label[kLabelCount];
  for (std::size_t i = 0; i < kLabelCount; ++i) c_label[i] = table.column(to_string(kAllLabels[i]));

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    auto where = [&](const std::string& col) {
      return source + ":" + std::to_string(line) + ": column '" + col + "'";
    };
    auto reject = [&](const std::string& col, const std::string& msg) {
      if (opts.strict) throw ValidationError(where(col) + ": " + msg);
      ds.issues.push_back({line, col, msg, true});
    };

    DataRecord rec;
    rec.material = row[c_material];
    if (!registry->find(rec.material)) {
      throw ValidationError(where("material") + ": unknown material '" + rec.material + "'");
    }
    const auto sub = parse_subprocess(row[c_subprocess]);
    if (!sub) {
      throw ValidationError(where("subprocess") + ": unknown level '" + row[c_subprocess] + "'");
    }
    rec.subprocess = *sub;
    rec.process = process_of(*sub);
    bool ok = true;
    if (c_process && !row[*c_process].empty()) {
      const auto p = parse_process(row[*c_process]);
      if (!p) throw ValidationError(where("process") + ": unknown level '" + row[*c_process] + "'");
      if (*p != rec.process) {
        reject("process", "process '" + row[*c_process] + "' inconsistent with subprocess '" +
                              std::string(to_string(*sub)) + "'");
        ok = false;
      }
    }
    rec.machine = row[c_machine];
    if (rec.machine.empty()) {
      reject("machine", "empty machine identifier");
      ok = false;
    }
    const auto orient = parse_orientation(row[c_orientation]);
    if (!orient) {
      throw ValidationError(where("orientation") + ": unknown level '" + row[c_orientation] + "'");
    }
    rec.orientation = *orient;
    if (const auto k = parse_post_processing_kind(row[c_post])) {
      rec.post_processing.kind = *k;
    } else if (opts.map_unknown_to_other && !row[c_post].empty()) {
      rec.post_processing.kind = PostProcessing::Kind::other;
      rec.post_processing.tag = row[c_post];
    } else {
      throw ValidationError(where("post_processing") + ": unknown level '" + row[c_post] + "'");
    }
    if (c_surface && !row[*c_surface].empty()) {
      const auto s = parse_surface(row[*c_surface]);
      if (!s) {
        throw ValidationError(where("surface_condition") + ": unknown level '" +
                              row[*c_surface] + "'");
      }
      rec.surface_condition = *s;
    }
    for (std::size_t i = 0; i < 4; ++i) {
      if (!c_numeric[i]) continue;
      const auto v = parse_number(row[*c_numeric[i]], where(kNumericColumns[i]));
      if (v && *v <= 0.0) {
        reject(kNumericColumns[i], "value " + format_number(*v) + " must be strictly positive");
        ok = false;
      }
      rec.*numeric_member(i) = v;
    }
    bool any_label = false;
    for (std::size_t i = 0; i < kLabelCount; ++i) {
      if (!c_label[i]) continue;
      const std::string col(to_string(kAllLabels[i]));
      const auto v = parse_number(row[*c_label[i]], where(col));
      if (v && *v <= 0.0) {
        reject(col, "label value " + format_number(*v) + " must be strictly positive");
        ok = false;
      }
      rec.labels[i] = v;
      any_label = any_label || v.has_value();
    }
    if (!any_label) {
      reject("labels", "record carries no label");
      ok = false;
    }
    if (c_source) rec.source = row[*c_source];
    if (ok) ds.records.push_back(std::move(rec));
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path,
                     std::shared_ptr<const MaterialRegistry> registry, const LoadOptions& opts) {
  return parse_dataset(read_text_file(path), path.string(), std::move(registry), opts);
}

std::string serialize_dataset(const Dataset& ds) {
  std::vector<std::string> header = {"material",  "process",     "subprocess",
                                     "machine",   "orientation", "post_processing",
                                     "surface_condition"};
  for (const char* c : kNumericColumns) header.emplace_back(c);
  for (LabelKind k : kAllLabels) header.emplace_back(to_string(k));
  header.emplace_back("source");
  std::string out = csv_line(header);
  auto num = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& r : ds.records) {
    std::vector<std::string> cells = {
        r.material,
        std::string(to_string(r.process)),
        std::string(to_string(r.subprocess)),
        r.machine,
        std::string(to_string(r.orientation)),
        r.post_processing.label(),
        r.surface_condition ? std::string(to_string(*r.surface_condition)) : std::string()};
    for (std::size_t i = 0; i < 4; ++i) cells.push_back(num(r.*numeric_member(i)));
    for (const auto& l : r.labels) cells.push_back(num(l));
    cells.push_back(r.source);
    out += csv_line(cells);
  }
  return out;
}

bool has_field(const Dataset& ds, const DataRecord& r, RequiredField f) {
  switch (f) {
    case RequiredField::beam_power: return r.beam_power.has_value();
    case RequiredField::scan_speed: return r.scan_speed.has_value();
    case RequiredField::layer_thickness: return r.layer_thickness.has_value();
    case RequiredField::beam_diameter: return r.beam_diameter.has_value();
    case RequiredField::surface_condition: return r.surface_condition.has_value();
    default: break;
  }
  const MaterialSpec& m = ds.material_of(r);
  switch (f) {
    case RequiredField::density: return m.density.has_value();
    case RequiredField::melting_point: return m.melting_point.has_value();
    case RequiredField::thermal_conductivity: return m.thermal_conductivity.has_value();
    case RequiredField::specific_heat: return m.specific_heat.has_value();
    case RequiredField::cte: return m.cte.has_value();
    case RequiredField::composition: return m.composition_total() > 0.0;
    default: return true;
  }
}

Dataset select_complete(const Dataset& ds, const FeatureRequest& request, LabelKind label) {
  Dataset out;
  out.registry = ds.registry;
  for (const auto& r : ds.records) {
    if (!r.label(label)) continue;
    const bool complete = std::all_of(request.fields.begin(), request.fields.end(),
                                      [&](RequiredField f) { return has_field(ds, r, f); });
    if (complete) out.records.push_back(r);
  }
  return out;
}

}  // namespace mamprop
