#include "mamprop/eqdiscovery.hpp"
#include "mamprop/error.hpp"

namespace mamprop {
namespace {

std::optional<double> raw_value(const Dataset& ds, const DataRecord& r, const std::string& field) {
  if (field == "beam_power") return r.beam_power;
  if (field == "scan_speed") return r.scan_speed;
  if (field == "layer_thickness") return r.layer_thickness;
  if (field == "beam_diameter") return r.beam_diameter;
  const MaterialSpec* m = ds.registry ? ds.registry->find(r.material) : nullptr;
  if (!m) return std::nullopt;
  if (field == "density") return m->density;
  if (field == "specific_heat") return m->specific_heat;
  if (field == "cte") return m->cte;
  if (field == "thermal_conductivity") return m->thermal_conductivity;
  if (field == "melting_point") return m->melting_point;
  throw SchemaError("unknown power-law quantity field '" + field + "'");
}

}  // namespace

PowerLawData powerlaw_data(const Dataset& ds, LabelKind label, const std::optional<std::string>& condition,
                           const QuantityTable& table) {
  const double label_factor = label_to_si(label);
  std::optional<PostProcessing> want;
  if (condition) {
    PostProcessing pp;
    const auto kind = parse_post_processing_kind(*condition);
    if (kind) {
      pp.kind = *kind;
    } else {
      pp.kind = PostProcessing::Kind::other;
      pp.tag = *condition;
    }
    want = pp;
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> ys;
  PowerLawData out;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const DataRecord& r = ds.records[i];
    if (want && !(r.post_processing == *want)) continue;
    const auto& lab = r.label(label);
    if (!lab) continue;
    std::vector<double> row;
    bool complete = true;
    for (const auto& q : table.quantities) {
      const auto v = raw_value(ds, r, q.field);
      if (!v) {
        complete = false;
        break;
      }
      row.push_back(q.si_factor * (*v - q.si_offset));
    }
    if (!complete) continue;
    rows.push_back(std::move(row));
    ys.push_back(*lab * label_factor);
    out.records.push_back(i);
  }
  out.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.size()));
  out.y.resize(static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    out.y(static_cast<Eigen::Index>(i)) = ys[i];
  }
  return out;
}

}  // namespace mamprop
