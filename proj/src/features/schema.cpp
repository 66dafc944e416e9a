#include <algorithm>
#include <set>

#include "mamprop/csv.hpp"
#include "mamprop/error.hpp"
#include "mamprop/features.hpp"
#include "mamprop/io.hpp"

namespace mamprop {

namespace {

const char* origin_name(ColumnOrigin o) {
  switch (o) {
    case ColumnOrigin::numeric: return "numeric";
    case ColumnOrigin::one_hot: return "one_hot";
    case ColumnOrigin::composition: return "composition";
    case ColumnOrigin::elemental: return "elemental";
  }
  return "?";
}

ColumnOrigin parse_origin(const std::string& s) {
  if (s == "numeric") return ColumnOrigin::numeric;
  if (s == "one_hot") return ColumnOrigin::one_hot;
  if (s == "composition") return ColumnOrigin::composition;
  if (s == "elemental") return ColumnOrigin::elemental;
  throw SchemaError("unknown column origin '" + s + "'");
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<FeatureColumn> columns) : columns_(std::move(columns)) {
  std::set<std::string> seen;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second) throw SchemaError("duplicate feature name '" + c.name + "'");
  }
  for (std::size_t i = 0; i < columns_.size();) {
    const auto& c = columns_[i];
    if (c.origin != ColumnOrigin::one_hot) {
      ++i;
      continue;
    }
    if (c.group_size == 0 || i + c.group_size > columns_.size()) {
      throw SchemaError("one-hot group '" + c.key + "' overruns the schema");
    }
    for (std::size_t j = i; j < i + c.group_size; ++j) {
      const auto& m = columns_[j];
      if (m.origin != ColumnOrigin::one_hot || m.key != c.key || m.group_size != c.group_size) {
        throw SchemaError("one-hot group '" + c.key + "' is not contiguous");
      }
    }
    i += c.group_size;
  }
}

std::vector<std::string> FeatureSchema::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

std::vector<FeatureGroup> FeatureSchema::groups() const {
  std::vector<FeatureGroup> out;
  for (std::size_t i = 0; i < columns_.size();) {
    const auto& c = columns_[i];
    if (c.origin == ColumnOrigin::one_hot) {
      out.push_back({c.key, i, c.group_size});
      i += c.group_size;
    } else {
      out.push_back({c.name, i, 1});
      ++i;
    }
  }
  return out;
}

std::vector<std::size_t> FeatureSchema::kept_columns(const std::vector<std::string>& drop) const {
  const auto gs = groups();
  for (const auto& d : drop) {
    const bool known =
        std::any_of(gs.begin(), gs.end(), [&](const FeatureGroup& g) { return g.name == d; });
    if (!known) throw SchemaError("unknown feature group '" + d + "'");
  }
  std::vector<std::size_t> kept;
  for (const auto& g : gs) {
    if (std::find(drop.begin(), drop.end(), g.name) != drop.end()) continue;
    for (std::size_t j = g.first; j < g.first + g.count; ++j) kept.push_back(j);
  }
  return kept;
}

FeatureSchema FeatureSchema::without_groups(const std::vector<std::string>& drop) const {
  std::vector<FeatureColumn> cols;
  for (std::size_t j : kept_columns(drop)) cols.push_back(columns_[j]);
  return FeatureSchema(std::move(cols));
}

std::uint64_t FeatureSchema::fingerprint() const {
  std::string canon;
  for (const auto& c : columns_) {
    canon += origin_name(c.origin);
    canon += '\x1f';
    canon += c.name;
    canon += '\x1f';
    canon += c.key;
    canon += '\x1f';
    canon += c.detail;
    canon += '\x1f';
    canon += std::to_string(c.group_size);
    canon += '\x1e';
  }
  return fnv1a64(canon);
}

nlohmann::json FeatureSchema::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_) {
    cols.push_back({{"origin", origin_name(c.origin)},
                    {"name", c.name},
                    {"key", c.key},
                    {"detail", c.detail},
                    {"group_size", c.group_size}});
  }
  return {{"columns", cols}, {"fingerprint", hex64(fingerprint())}};
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
  try {
    std::vector<FeatureColumn> cols;
    for (const auto& c : j.at("columns")) {
      FeatureColumn col;
      col.origin = parse_origin(c.at("origin").get<std::string>());
      col.name = c.at("name").get<std::string>();
      col.key = c.at("key").get<std::string>();
      col.detail = c.at("detail").get<std::string>();
      col.group_size = c.at("group_size").get<std::size_t>();
      cols.push_back(std::move(col));
    }
    FeatureSchema s(std::move(cols));
    if (j.contains("fingerprint") && j.at("fingerprint").get<std::string>() != hex64(s.fingerprint())) {
      throw SchemaError("feature schema fingerprint does not match its columns");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed feature schema: ") + e.what());
  }
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& rows) const {
  FeatureMatrix out;
  out.schema = schema;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  out.row_ids.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(rows[i]));
    out.row_ids.push_back(row_ids.empty() ? rows[i] : row_ids[rows[i]]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::size_t>& cols) const {
  std::vector<FeatureColumn> kept;
  FeatureMatrix out;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.values.col(static_cast<Eigen::Index>(j)) = values.col(static_cast<Eigen::Index>(cols[j]));
    kept.push_back(schema[cols[j]]);
  }
  out.schema = FeatureSchema(std::move(kept));
  out.row_ids = row_ids;
  out.warnings = warnings;
  return out;
}

std::string FeatureMatrix::to_csv() const {
  std::vector<std::string> header = {"row_id"};
  for (const auto& n : schema.names()) header.push_back(n);
  std::string out = csv_line(header);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    std::vector<std::string> cells;
    cells.push_back(std::to_string(row_ids.empty() ? static_cast<std::size_t>(i)
                                                   : row_ids[static_cast<std::size_t>(i)]));
    for (Eigen::Index j = 0; j < values.cols(); ++j) cells.push_back(format_number(values(i, j)));
    out += csv_line(cells);
  }
  return out;
}

}  // namespace mamprop
