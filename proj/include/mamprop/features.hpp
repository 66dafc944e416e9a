#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mamprop/data.hpp"

namespace mamprop {

enum class ColumnOrigin { numeric, one_hot, composition, elemental };

/// One feature column.
///   numeric:     key = quantity name, detail = unit
///   one_hot:     key = group name,    detail = level, group_size = levels in group
///   composition: key = element symbol
///   elemental:   key = mixture-rule property name
struct FeatureColumn {
  ColumnOrigin origin = ColumnOrigin::numeric;
  std::string name;
  std::string key;
  std::string detail;
  std::size_t group_size = 1;

  bool operator==(const FeatureColumn&) const = default;
};

/// A contiguous block of columns that is ablated as a unit (a one-hot group, or a
/// single non-categorical column).
struct FeatureGroup {
  std::string name;
  std::size_t first = 0;
  std::size_t count = 1;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  /// Validates one-hot contiguity and name uniqueness (SchemaError otherwise).
  explicit FeatureSchema(std::vector<FeatureColumn> columns);

  const std::vector<FeatureColumn>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  const FeatureColumn& operator[](std::size_t i) const { return columns_[i]; }
  std::vector<std::string> names() const;
  std::vector<FeatureGroup> groups() const;

  /// Schema with the given groups removed. Unknown group names raise SchemaError.
  FeatureSchema without_groups(const std::vector<std::string>& groups) const;
  /// Column indices kept by without_groups(groups), in order.
  std::vector<std::size_t> kept_columns(const std::vector<std::string>& groups) const;

  /// Stable hash of the canonical column list.
  std::uint64_t fingerprint() const;

  nlohmann::json to_json() const;
  static FeatureSchema from_json(const nlohmann::json& j);

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<FeatureColumn> columns_;
};

struct FeatureMatrix {
  Eigen::MatrixXd values;
  FeatureSchema schema;
  std::vector<std::size_t> row_ids;   ///< index of the source record in its dataset
  std::vector<std::string> warnings;  ///< e.g. unseen one-hot levels

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  FeatureMatrix select_rows(const std::vector<std::size_t>& rows) const;
  FeatureMatrix select_columns(const std::vector<std::size_t>& cols) const;
  std::string to_csv() const;
};

enum class Featurization { baseline, composition, elemental };

std::string_view to_string(Featurization f);
std::optional<Featurization> parse_featurization(std::string_view s);

struct FeaturizationPlan {
  Featurization kind = Featurization::baseline;
  /// Standardize one-hot columns too (off by default: only numeric-origin columns).
  bool standardize_onehot = false;
  /// Feature groups removed after construction (used for "selected" feature sets).
  std::vector<std::string> dropped_groups;
};

/// Fields a plan needs before a record can be featurized.
FeatureRequest required_fields(const FeaturizationPlan& plan);

/// Baseline schema: numeric [beam_power, layer_thickness, density, melting_point,
/// thermal_conductivity, specific_heat, cte] then one-hot groups [material, machine,
/// orientation, post_processing, process, subprocess]. Material levels come from the
/// registry, machine and custom post-processing levels from the dataset, the rest from
/// the fixed vocabularies; every group is sorted lexicographically.
FeatureSchema baseline_schema(const Dataset& ds);

/// Fills a matrix for any schema built by this module. One-hot levels absent from the
/// schema produce an all-zero block and a warning. Throws ValidationError naming the
/// record when a numeric value is missing.
FeatureMatrix build_features(const Dataset& ds, const FeatureSchema& schema,
                             const ElementTable* elements = nullptr);

FeatureMatrix baseline_features(const Dataset& ds);
/// Appends one wt% column per element used by any registered material (absent -> 0).
FeatureMatrix composition_features(const Dataset& ds, const FeatureMatrix& base);
/// Appends the five mixture-rule columns x_i = sum_j x_ij a_j with a_j the normalized
/// mass fractions.
FeatureMatrix elemental_features(const Dataset& ds, const ElementTable& elements,
                                 const FeatureMatrix& base);

FeatureSchema plan_schema(const Dataset& ds, const FeaturizationPlan& plan,
                          const ElementTable* elements);
FeatureMatrix featurize(const Dataset& ds, const FeaturizationPlan& plan,
                        const ElementTable* elements);

/// Label vector for `label`; every record must carry it.
Eigen::VectorXd label_vector(const Dataset& ds, LabelKind label);

/// Per-column affine standardization fit on training rows.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<bool> passthrough;  ///< zero variance: centered only
  std::vector<bool> active;       ///< column participates at all

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& z) const;
  nlohmann::json to_json() const;
  static Standardizer from_json(const nlohmann::json& j);
};

/// Population (divisor n) statistics. Only numeric-origin columns are active unless
/// `standardize_onehot`. Throws ValidationError on an empty matrix.
Standardizer fit_standardizer(const FeatureMatrix& x, bool standardize_onehot = false);
FeatureMatrix apply_standardizer(const Standardizer& s, const FeatureMatrix& x);

}  // namespace mamprop
