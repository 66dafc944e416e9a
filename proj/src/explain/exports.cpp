#include <algorithm>
#include <cmath>
#include <numeric>

#include "mamprop/csv.hpp"
#include "mamprop/error.hpp"
#include "mamprop/explain.hpp"
#include "mamprop/io.hpp"

namespace mamprop {

namespace {

std::vector<std::size_t> by_abs_phi(const ShapExplanation& e) {
  std::vector<std::size_t> order(static_cast<std::size_t>(e.phis.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(e.phis(static_cast<Eigen::Index>(a))) > std::abs(e.phis(static_cast<Eigen::Index>(b)));
  });
  return order;
}

}  // namespace

std::vector<WaterfallRow> waterfall(const ShapExplanation& e, const std::vector<std::string>& names) {
  std::vector<WaterfallRow> rows;
  double at = e.base_value;
  for (std::size_t j : by_abs_phi(e)) {
    const auto jj = static_cast<Eigen::Index>(j);
    WaterfallRow r{names[j], e.feature_values(jj), e.phis(jj), at, at + e.phis(jj)};
    at = r.end;
    rows.push_back(r);
  }
  return rows;
}

std::optional<std::size_t> interaction_partner(const std::vector<ShapExplanation>& ex, std::size_t target) {
  if (ex.empty()) return std::nullopt;
  const auto p = static_cast<std::size_t>(ex.front().phis.size());
  std::vector<double> phi;
  for (const auto& e : ex) phi.push_back(e.phis(static_cast<Eigen::Index>(target)));
  std::optional<std::size_t> best;
  double best_abs = -1.0;
  for (std::size_t j = 0; j < p; ++j) {
    if (j == target) continue;
    std::vector<double> v;
    for (const auto& e : ex) v.push_back(e.feature_values(static_cast<Eigen::Index>(j)));
    const auto c = pearson(phi, v);
    if (c && std::abs(*c) > best_abs) {
      best_abs = std::abs(*c);
      best = j;
    }
  }
  return best;
}

void write_shap_exports(const std::vector<ShapExplanation>& ex, const std::vector<std::string>& names,
                        const std::filesystem::path& dir, const nlohmann::json& provenance) {
  if (ex.empty()) throw ValidationError("no explanations to export");
  for (const auto& e : ex) {
    if (e.schema_fingerprint != ex.front().schema_fingerprint ||
        static_cast<std::size_t>(e.phis.size()) != names.size()) {
      throw SchemaError("explanations do not share one feature schema");
    }
  }
  std::filesystem::create_directories(dir);
  const std::size_t p = names.size();

  const ImportanceReport summary = mean_abs_shap(ex, names);
  write_file_atomic(dir / "summary.csv", summary.to_csv());

  std::string swarm = csv_line({"instance", "feature", "phi", "value"});
  std::string force = csv_line({"instance", "feature", "value", "phi", "direction"});
  std::string wf = csv_line({"instance", "step", "feature", "value", "phi", "start", "end"});
  for (std::size_t i = 0; i < ex.size(); ++i) {
    const auto& e = ex[i];
    const std::string id = std::to_string(i);
    for (std::size_t j = 0; j < p; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      swarm += csv_line({id, names[j], format_number(e.phis(jj)), format_number(e.feature_values(jj))});
    }
    for (std::size_t j : by_abs_phi(e)) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (e.phis(jj) == 0.0) continue;
      force += csv_line({id, names[j], format_number(e.feature_values(jj)), format_number(e.phis(jj)),
                         e.phis(jj) > 0 ? "increase" : "decrease"});
    }
    wf += csv_line({id, "0", "E[f(x)]", "", "", format_number(e.base_value), format_number(e.base_value)});
    std::size_t step = 1;
    for (const auto& r : waterfall(e, names)) {
      wf += csv_line({id, std::to_string(step++), r.feature, format_number(r.value), format_number(r.phi),
                      format_number(r.start), format_number(r.end)});
    }
    wf += csv_line({id, std::to_string(step), "f(x)", "", "", format_number(e.prediction),
                    format_number(e.prediction)});
  }
  write_file_atomic(dir / "summary_swarm.csv", swarm);
  write_file_atomic(dir / "force.csv", force);
  write_file_atomic(dir / "waterfall.csv", wf);

  // decision paths accumulate from the least to the most important feature
  std::vector<std::size_t> global(p);
  std::iota(global.begin(), global.end(), std::size_t{0});
  std::stable_sort(global.begin(), global.end(),
                   [&](std::size_t a, std::size_t b) { return summary.scores[a] < summary.scores[b]; });
  std::string decision = csv_line({"instance", "step", "feature", "cumulative"});
  for (std::size_t i = 0; i < ex.size(); ++i) {
    double at = ex[i].base_value;
    decision += csv_line({std::to_string(i), "0", "E[f(x)]", format_number(at)});
    std::size_t step = 1;
    for (std::size_t j : global) {
      at += ex[i].phis(static_cast<Eigen::Index>(j));
      decision += csv_line({std::to_string(i), std::to_string(step++), names[j], format_number(at)});
    }
  }
  write_file_atomic(dir / "decision.csv", decision);

  std::string dep = csv_line({"feature", "instance", "value", "phi", "partner", "partner_value"});
  nlohmann::json partners = nlohmann::json::object();
  for (std::size_t j = 0; j < p; ++j) {
    const auto partner = interaction_partner(ex, j);
    partners[names[j]] = partner ? nlohmann::json(names[*partner]) : nlohmann::json(nullptr);
    for (std::size_t i = 0; i < ex.size(); ++i) {
      const auto jj = static_cast<Eigen::Index>(j);
      dep += csv_line({names[j], std::to_string(i), format_number(ex[i].feature_values(jj)),
                       format_number(ex[i].phis(jj)), partner ? names[*partner] : "",
                       partner ? format_number(ex[i].feature_values(static_cast<Eigen::Index>(*partner))) : ""});
    }
  }
  write_file_atomic(dir / "dependence.csv", dep);

  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : ex) {
    list.push_back({{"base_value", e.base_value},
                    {"prediction", e.prediction},
                    {"phis", vector_to_json(e.phis)},
                    {"feature_values", vector_to_json(e.feature_values)}});
  }
  nlohmann::json doc{{"format_version", 1},
                     {"provenance", provenance},
                     {"features", names},
                     {"schema_fingerprint", hex64(ex.front().schema_fingerprint)},
                     {"mean_abs_shap", summary.to_json()},
                     {"interaction_partners", partners},
                     {"explanations", list}};
  write_file_atomic(dir / "shap.json", doc.dump(1) + "\n");
}

}  // namespace mamprop
