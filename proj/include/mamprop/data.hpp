#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mamprop {

// ---------------------------------------------------------------------------
// Categorical vocabularies
// ---------------------------------------------------------------------------

enum class Process { pbf, ded };
enum class Subprocess { l_pbf, e_pbf, l_ded, e_ded, arc_ded, wire_l_ded };
enum class Orientation { horizontal, vertical, deg45 };
enum class SurfaceCondition { as_built, bead_blasted, shot_peened, corundum_blasted };

struct PostProcessing {
  enum class Kind { as_built, ht, hip, sr, other };
  Kind kind = Kind::as_built;
  std::string tag;  ///< only meaningful for Kind::other

  /// Canonical text: "as_built", "HT", "HIP", "SR", or the other-tag.
  std::string label() const;
  bool operator==(const PostProcessing&) const = default;
};

/// Mechanical property labels, in the order of the dataset columns.
enum class LabelKind { ys, uts, e_mod, elongation, hv, hrc, rz };
inline constexpr std::size_t kLabelCount = 7;
inline constexpr std::array<LabelKind, kLabelCount> kAllLabels = {
    LabelKind::ys, LabelKind::uts, LabelKind::e_mod, LabelKind::elongation,
    LabelKind::hv, LabelKind::hrc, LabelKind::rz};

std::string_view to_string(Process p);
std::string_view to_string(Subprocess s);
std::string_view to_string(Orientation o);
std::string_view to_string(SurfaceCondition s);
/// Column name of a label ("ys", "uts", "e_mod", ...).
std::string_view to_string(LabelKind k);
std::string_view label_unit(LabelKind k);
std::string_view label_title(LabelKind k);

// Lenient parsers (case-insensitive, common aliases). nullopt when unrecognised.
std::optional<Process> parse_process(std::string_view s);
std::optional<Subprocess> parse_subprocess(std::string_view s);
/// "XY"/"horizontal" -> horizontal, "Z"/"vertical" -> vertical, "45"/"45deg" -> deg45.
std::optional<Orientation> parse_orientation(std::string_view s);
std::optional<SurfaceCondition> parse_surface(std::string_view s);
std::optional<PostProcessing::Kind> parse_post_processing_kind(std::string_view s);
std::optional<LabelKind> parse_label(std::string_view s);

Process process_of(Subprocess s);

// ---------------------------------------------------------------------------
// Material registry
// ---------------------------------------------------------------------------

/// Thermal properties are stored in the literature units of the appendix tables:
/// density in g/cm^3, conductivity W/(m K), melting point in deg C, CTE in 1e-6/K,
/// specific heat J/(kg K). Absent cells stay empty.
struct MaterialSpec {
  std::string name;
  std::map<std::string, double> composition;  ///< element symbol -> wt%
  std::optional<double> density;
  std::optional<double> thermal_conductivity;
  std::optional<double> melting_point;
  std::optional<double> cte;
  std::optional<double> specific_heat;

  double composition_total() const;
  bool has_thermal_properties() const;
};

struct Warning {
  std::size_t line = 0;  ///< 1-based source line, 0 when not tied to a line
  std::string column;
  std::string message;
};

class MaterialRegistry {
 public:
  MaterialRegistry() = default;

  /// Throws ValidationError on a duplicate name.
  void add(MaterialSpec spec);

  const std::vector<MaterialSpec>& materials() const { return materials_; }
  std::size_t size() const { return materials_.size(); }
  bool empty() const { return materials_.empty(); }
  const MaterialSpec* find(std::string_view name) const;
  const MaterialSpec& at(std::string_view name) const;

  /// Element columns in file order (also used when serializing).
  const std::vector<std::string>& element_columns() const { return element_columns_; }
  void set_element_columns(std::vector<std::string> cols) { element_columns_ = std::move(cols); }

  /// Elements with a non-zero wt% in at least one material, sorted.
  std::vector<std::string> used_elements() const;

  std::vector<Warning> warnings;

 private:
  std::vector<MaterialSpec> materials_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::string> element_columns_;
};

struct LoadOptions {
  /// Upgrade plausibility warnings to ValidationError.
  bool strict = false;
  /// Unknown post-processing level: reject (false) or map to other(tag) (true).
  bool map_unknown_to_other = false;
};

MaterialRegistry load_materials(const std::filesystem::path& path, const LoadOptions& opts = {});
MaterialRegistry parse_materials(std::string_view csv_text, const std::string& source,
                                 const LoadOptions& opts = {});
std::string serialize_materials(const MaterialRegistry& registry);

// ---------------------------------------------------------------------------
// Element table
// ---------------------------------------------------------------------------

struct ElementProperties {
  std::string symbol;
  int atomic_number = 0;
  double atomic_volume = 0.0;      ///< cm^3/mol
  double ionization_energy = 0.0;  ///< eV
  double heat_of_fusion = 0.0;     ///< kJ/mol
  double electron_affinity = 0.0;  ///< eV
};

/// Names of the mixture-rule properties, in feature order.
inline constexpr std::array<std::string_view, 5> kElementalProperties = {
    "atomic_number", "atomic_volume", "ionization_energy", "heat_of_fusion",
    "electron_affinity"};

double elemental_property(const ElementProperties& e, std::string_view property);

class ElementTable {
 public:
  void add(ElementProperties e);
  const ElementProperties* find(std::string_view symbol) const;
  const std::vector<ElementProperties>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

 private:
  std::vector<ElementProperties> elements_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// When `registry` is given, every element it uses must be present (SchemaError names it).
ElementTable load_elements(const std::filesystem::path& path,
                           const MaterialRegistry* registry = nullptr);
ElementTable parse_elements(std::string_view csv_text, const std::string& source,
                            const MaterialRegistry* registry = nullptr);
void check_element_coverage(const ElementTable& table, const MaterialRegistry& registry);
std::string serialize_elements(const ElementTable& table);

// ---------------------------------------------------------------------------
// Experimental records
// ---------------------------------------------------------------------------

enum class NumericParam { beam_power, scan_speed, layer_thickness, beam_diameter };

struct DataRecord {
  std::string material;
  Process process = Process::pbf;
  Subprocess subprocess = Subprocess::l_pbf;
  std::string machine;
  Orientation orientation = Orientation::horizontal;
  PostProcessing post_processing;
  std::optional<SurfaceCondition> surface_condition;
  std::optional<double> beam_power;       ///< W
  std::optional<double> scan_speed;       ///< mm/s
  std::optional<double> layer_thickness;  ///< um
  std::optional<double> beam_diameter;    ///< um
  std::array<std::optional<double>, kLabelCount> labels{};
  std::string source;

  const std::optional<double>& label(LabelKind k) const {
    return labels[static_cast<std::size_t>(k)];
  }
  std::optional<double>& label(LabelKind k) { return labels[static_cast<std::size_t>(k)]; }
  const std::optional<double>& param(NumericParam p) const;
};

/// A row dropped during loading, or a non-fatal remark about an accepted row.
struct RowIssue {
  std::size_t line = 0;
  std::string column;
  std::string message;
  bool rejected = false;
};

struct Dataset {
  std::shared_ptr<const MaterialRegistry> registry;
  std::vector<DataRecord> records;
  std::vector<RowIssue> issues;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  const MaterialSpec& material_of(const DataRecord& r) const { return registry->at(r.material); }
};

Dataset load_dataset(const std::filesystem::path& path,
                     std::shared_ptr<const MaterialRegistry> registry,
                     const LoadOptions& opts = {});
Dataset parse_dataset(std::string_view csv_text, const std::string& source,
                      std::shared_ptr<const MaterialRegistry> registry,
                      const LoadOptions& opts = {});
std::string serialize_dataset(const Dataset& ds);

/// Fields a learning task may require to be present.
enum class RequiredField {
  beam_power,
  scan_speed,
  layer_thickness,
  beam_diameter,
  density,
  melting_point,
  thermal_conductivity,
  specific_heat,
  cte,
  composition,
  surface_condition,
};

struct FeatureRequest {
  std::vector<RequiredField> fields;
};

bool has_field(const Dataset& ds, const DataRecord& r, RequiredField f);

/// Records that carry `label` and every requested field, in original order.
Dataset select_complete(const Dataset& ds, const FeatureRequest& request, LabelKind label);

struct Histogram {
  std::string quantity;
  std::string unit;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
  std::size_t missing = 0;
};

struct SummaryStats {
  std::size_t n_records = 0;
  /// axis name -> (level -> count). Axes: subprocess, orientation, post_processing,
  /// surface_condition, material, machine. Records without a surface condition are
  /// counted under "missing".
  std::map<std::string, std::map<std::string, std::size_t>> categories;
  std::map<std::string, std::size_t> label_counts;
  std::vector<Histogram> histograms;
};

SummaryStats summarize(const Dataset& ds, std::size_t bins = 20);

}  // namespace mamprop
