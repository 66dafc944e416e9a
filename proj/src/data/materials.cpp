#include <algorithm>
#include <cctype>
#include <set>

#include "mamprop/csv.hpp"
#include "mamprop/data.hpp"
#include "mamprop/error.hpp"
#include "mamprop/io.hpp"

namespace mamprop {

namespace {

struct ThermalColumn {
  const char* name;
  std::optional<double> MaterialSpec::*field;
  double lo;
  double hi;
};

// Plausibility ranges in the stored literature units.
const ThermalColumn kThermal[] = {
    {"density", &MaterialSpec::density, 0.5, 25.0},
    {"thermal_conductivity", &MaterialSpec::thermal_conductivity, 1.0, 500.0},
    {"melting_point", &MaterialSpec::melting_point, 400.0, 3500.0},
    {"cte", &MaterialSpec::cte, 0.5, 40.0},
    {"specific_heat", &MaterialSpec::specific_heat, 100.0, 2000.0},
};

bool looks_like_symbol(const std::string& s) {
  if (s.empty() || s.size() > 2) return false;
  if (!std::isupper(static_cast<unsigned char>(s[0]))) return false;
  return s.size() == 1 || std::islower(static_cast<unsigned char>(s[1]));
}

}  // namespace

double MaterialSpec::composition_total() const {
  double total = 0.0;
  for (const auto& [el, wt] : composition) total += wt;
  return total;
}

bool MaterialSpec::has_thermal_properties() const {
  return density && thermal_conductivity && melting_point && cte && specific_heat;
}

void MaterialRegistry::add(MaterialSpec spec) {
  if (index_.count(spec.name)) {
    throw ValidationError("duplicate material name '" + spec.name + "'");
  }
  index_.emplace(spec.name, materials_.size());
  materials_.push_back(std::move(spec));
}

const MaterialSpec* MaterialRegistry::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &materials_[it->second];
}

const MaterialSpec& MaterialRegistry::at(std::string_view name) const {
  if (const auto* m = find(name)) return *m;
  throw ValidationError("unknown material '" + std::string(name) + "'");
}

std::vector<std::string> MaterialRegistry::used_elements() const {
  std::set<std::string> used;
  for (const auto& m : materials_) {
    for (const auto& [el, wt] : m.composition) {
      if (wt > 0.0) used.insert(el);
    }
  }
  return {used.begin(), used.end()};
}

MaterialRegistry parse_materials(std::string_view csv_text, const std::string& source,
                                 const LoadOptions& opts) {
  const CsvTable table = parse_csv(csv_text, source);
  MaterialRegistry registry;
  if (table.header.empty()) return registry;

  const auto name_col = table.column("name");
  if (!name_col) throw SchemaError(source + ": missing required column 'name'");
  std::vector<std::size_t> thermal_cols;
  for (const auto& tc : kThermal) {
    const auto c = table.column(tc.name);
    if (!c) throw SchemaError(source + ": missing required column '" + tc.name + "'");
    thermal_cols.push_back(*c);
  }
  std::vector<std::pair<std::size_t, std::string>> element_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == *name_col ||
        std::find(thermal_cols.begin(), thermal_cols.end(), c) != thermal_cols.end()) {
      continue;
    }
    if (!looks_like_symbol(table.header[c])) {
      throw SchemaError(source + ": unexpected column '" + table.header[c] +
                        "' (neither a property nor an element symbol)");
    }
    element_cols.emplace_back(c, table.header[c]);
  }
  std::vector<std::string> element_names;
  for (const auto& [c, sym] : element_cols) element_names.push_back(sym);
  registry.set_element_columns(element_names);

  auto warn = [&](std::size_t line, const std::string& column, const std::string& msg) {
    if (opts.strict) {
      throw ValidationError(source + ":" + std::to_string(line) + ": " + column + ": " + msg);
    }
    registry.warnings.push_back({line, column, msg});
  };

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    auto where = [&](const std::string& col) {
      return source + ":" + std::to_string(line) + ": column '" + col + "'";
    };
    MaterialSpec spec;
    spec.name = row[*name_col];
    if (spec.name.empty()) throw SchemaError(where("name") + ": empty material name");

    for (std::size_t t = 0; t < std::size(kThermal); ++t) {
      const auto& tc = kThermal[t];
      const auto value = parse_number(row[thermal_cols[t]], where(tc.name));
      if (value) {
        if (*value <= 0.0) {
          throw ValidationError(where(tc.name) + ": must be strictly positive");
        }
        if (*value < tc.lo || *value > tc.hi) {
          warn(line, tc.name,
               spec.name + ": value " + format_number(*value) + " outside plausible range [" +
                   format_number(tc.lo) + ", " + format_number(tc.hi) + "]");
        }
      }
      spec.*(tc.field) = value;
    }
    for (const auto& [c, sym] : element_cols) {
      const auto wt = parse_number(row[c], where(sym));
      if (!wt) continue;
      if (*wt < 0.0 || *wt > 100.0) {
        throw ValidationError(where(sym) + ": wt% must lie in [0, 100]");
      }
      if (*wt > 0.0) spec.composition[sym] = *wt;
    }
    const double total = spec.composition_total();
    if (total < 98.0 || total > 102.0) {
      warn(line, "composition",
           spec.name + ": composition sums to " + format_number(total) + " wt%");
    }
    if (registry.find(spec.name)) {
      throw ValidationError(where("name") + ": duplicate material name '" + spec.name + "'");
    }
    registry.add(std::move(spec));
  }
  return registry;
}

MaterialRegistry load_materials(const std::filesystem::path& path, const LoadOptions& opts) {
  return parse_materials(read_text_file(path), path.string(), opts);
}

std::string serialize_materials(const MaterialRegistry& registry) {
  std::vector<std::string> header = {"name"};
  for (const auto& tc : kThermal) header.emplace_back(tc.name);
  for (const auto& el : registry.element_columns()) header.push_back(el);
  std::string out = csv_line(header);
  for (const auto& m : registry.materials()) {
    std::vector<std::string> cells = {m.name};
    for (const auto& tc : kThermal) {
      const auto& v = m.*(tc.field);
      cells.push_back(v ? format_number(*v) : std::string());
    }
    for (const auto& el : registry.element_columns()) {
      auto it = m.composition.find(el);
      cells.push_back(it == m.composition.end() ? "0" : format_number(it->second));
    }
    out += csv_line(cells);
  }
  return out;
}

}  // namespace mamprop
