#include <cmath>

#include "mamprop/csv.hpp"
#include "mamprop/error.hpp"
#include "mamprop/evaluation.hpp"

namespace mamprop {

std::optional<double> pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ValidationError("pearson: length mismatch");
  if (a.size() < 2) return std::nullopt;
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(const Dataset& ds, const std::vector<LabelKind>& labels,
                                 const std::optional<std::string>& material) {
  CorrelationMatrix cm;
  cm.labels = labels;
  const std::size_t m = labels.size();
  cm.values.assign(m, std::vector<std::optional<double>>(m));
  cm.counts.assign(m, std::vector<std::size_t>(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      std::vector<double> a, b;
      for (const auto& r : ds.records) {
        if (material && r.material != *material) continue;
        const auto& va = r.label(labels[i]);
        const auto& vb = r.label(labels[j]);
        if (va && vb) {
          a.push_back(*va);
          b.push_back(*vb);
        }
      }
      std::optional<double> v = pearson(a, b);
      if (i == j && v) v = 1.0;
      cm.values[i][j] = cm.values[j][i] = v;
      cm.counts[i][j] = cm.counts[j][i] = a.size();
    }
  }
  return cm;
}

nlohmann::json CorrelationMatrix::to_json() const {
  nlohmann::json names = nlohmann::json::array(), vals = nlohmann::json::array(),
                 cnt = nlohmann::json::array();
  for (auto l : labels) names.push_back(std::string(to_string(l)));
  for (std::size_t i = 0; i < values.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& v : values[i]) row.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    vals.push_back(row);
    cnt.push_back(counts[i]);
  }
  return {{"labels", names}, {"values", vals}, {"counts", cnt}};
}

std::string CorrelationMatrix::to_csv() const {
  std::vector<std::string> header = {"label"};
  for (auto l : labels) header.emplace_back(to_string(l));
  std::string out = csv_line(header);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::vector<std::string> row = {std::string(to_string(labels[i]))};
    for (const auto& v : values[i]) row.push_back(v ? format_number(*v) : "NA");
    out += csv_line(row);
  }
  return out;
}

}  // namespace mamprop
