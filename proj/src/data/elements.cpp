#include "mamprop/csv.hpp"
#include "mamprop/data.hpp"
#include "mamprop/error.hpp"
#include "mamprop/io.hpp"

namespace mamprop {

double elemental_property(const ElementProperties& e, std::string_view property) {
  if (property == "atomic_number") return e.atomic_number;
  if (property == "atomic_volume") return e.atomic_volume;
  if (property == "ionization_energy") return e.ionization_energy;
  if (property == "heat_of_fusion") return e.heat_of_fusion;
  if (property == "electron_affinity") return e.electron_affinity;
  throw SchemaError("unknown elemental property '" + std::string(property) + "'");
}

void ElementTable::add(ElementProperties e) {
  if (index_.count(e.symbol)) throw ValidationError("duplicate element symbol '" + e.symbol + "'");
  index_.emplace(e.symbol, elements_.size());
  elements_.push_back(std::move(e));
}

const ElementProperties* ElementTable::find(std::string_view symbol) const {
  auto it = index_.find(symbol);
  return it == index_.end() ? nullptr : &elements_[it->second];
}

void check_element_coverage(const ElementTable& table, const MaterialRegistry& registry) {
  for (const auto& m : registry.materials()) {
    for (const auto& [el, wt] : m.composition) {
      if (wt > 0.0 && !table.find(el)) {
        throw SchemaError("element '" + el + "' used by material '" + m.name +
                          "' is missing from the element table");
      }
    }
  }
}

ElementTable parse_elements(std::string_view csv_text, const std::string& source,
                            const MaterialRegistry* registry) {
  const CsvTable csv = parse_csv(csv_text, source);
  ElementTable table;
  if (!csv.header.empty()) {
    const char* required[] = {"symbol", "atomic_number", "atomic_volume", "ionization_energy",
                              "heat_of_fusion", "electron_affinity"};
    std::size_t cols[6];
    for (int i = 0; i < 6; ++i) {
      const auto c = csv.column(required[i]);
      if (!c) throw SchemaError(source + ": missing required column '" + required[i] + "'");
      cols[i] = *c;
    }
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
      const auto& row = csv.rows[r];
      auto where = [&](int i) {
        return source + ":" + std::to_string(csv.line_numbers[r]) + ": column '" + required[i] +
               "'";
      };
      auto need = [&](int i) {
        const auto v = parse_number(row[cols[i]], where(i));
        if (!v) throw SchemaError(where(i) + ": value required");
        return *v;
      };
      ElementProperties e;
      e.symbol = row[cols[0]];
      if (e.symbol.empty()) throw SchemaError(where(0) + ": empty symbol");
      const double z = need(1);
      if (z < 1.0 || z != static_cast<double>(static_cast<int>(z))) {
        throw ValidationError(where(1) + ": atomic number must be an integer >= 1");
      }
      e.atomic_number = static_cast<int>(z);
      e.atomic_volume = need(2);
      e.ionization_energy = need(3);
      e.heat_of_fusion = need(4);
      e.electron_affinity = need(5);
      if (table.find(e.symbol)) {
        throw ValidationError(where(0) + ": duplicate element symbol '" + e.symbol + "'");
      }
      table.add(std::move(e));
    }
  }
  if (registry) check_element_coverage(table, *registry);
  return table;
}

ElementTable load_elements(const std::filesystem::path& path, const MaterialRegistry* registry) {
  return parse_elements(read_text_file(path), path.string(), registry);
}

std::string serialize_elements(const ElementTable& table) {
  std::string out = csv_line({"symbol", "atomic_number", "atomic_volume", "ionization_energy",
                              "heat_of_fusion", "electron_affinity"});
  for (const auto& e : table.elements()) {
    out += csv_line({e.symbol, std::to_string(e.atomic_number), format_number(e.atomic_volume),
                     format_number(e.ionization_energy), format_number(e.heat_of_fusion),
                     format_number(e.electron_affinity)});
  }
  return out;
}

}  // namespace mamprop
