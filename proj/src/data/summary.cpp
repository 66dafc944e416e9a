#include <algorithm>
#include <cmath>

#include "mamprop/data.hpp"
#include "mamprop/error.hpp"

namespace mamprop {

namespace {

Histogram histogram(const Dataset& ds, NumericParam p, const char* name, const char* unit,
                    std::size_t bins) {
  Histogram h;
  h.quantity = name;
  h.unit = unit;
  h.counts.assign(bins, 0);
  std::vector<double> values;
  for (const auto& r : ds.records) {
    if (const auto& v = r.param(p)) {
      values.push_back(*v);
    } else {
      ++h.missing;
    }
  }
  if (values.empty()) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double v : values) {
    std::size_t b = 0;
    if (width > 0.0) {
      b = static_cast<std::size_t>(std::floor((v - h.lo) / width));
      b = std::min(b, bins - 1);
    }
    ++h.counts[b];
  }
  return h;
}

}  // namespace

SummaryStats summarize(const Dataset& ds, std::size_t bins) {
  if (ds.empty()) throw ValidationError("summarize: dataset is empty");
  if (bins == 0) throw ValidationError("summarize: bin count must be >= 1");
  SummaryStats s;
  s.n_records = ds.size();
  for (const auto& r : ds.records) {
    s.categories["subprocess"][std::string(to_string(r.subprocess))]++;
    s.categories["orientation"][std::string(to_string(r.orientation))]++;
    s.categories["post_processing"][r.post_processing.label()]++;
    s.categories["surface_condition"][r.surface_condition
                                          ? std::string(to_string(*r.surface_condition))
                                          : std::string("missing")]++;
    s.categories["material"][r.material]++;
    s.categories["machine"][r.machine]++;
    for (LabelKind k : kAllLabels) {
      if (r.label(k)) s.label_counts[std::string(to_string(k))]++;
    }
  }
  for (LabelKind k : kAllLabels) s.label_counts.emplace(std::string(to_string(k)), 0);
  s.histograms.push_back(histogram(ds, NumericParam::beam_power, "beam_power", "W", bins));
  s.histograms.push_back(histogram(ds, NumericParam::scan_speed, "scan_speed", "mm/s", bins));
  s.histograms.push_back(
      histogram(ds, NumericParam::layer_thickness, "layer_thickness", "um", bins));
  s.histograms.push_back(histogram(ds, NumericParam::beam_diameter, "beam_diameter", "um", bins));
  return s;
}

}  // namespace mamprop
