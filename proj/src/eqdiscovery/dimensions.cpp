#include <cmath>
#include <sstream>

#include "mamprop/eqdiscovery.hpp"
#include "mamprop/error.hpp"

namespace mamprop {

DimensionVector DimensionVector::operator+(const DimensionVector& o) const {
  DimensionVector r;
  for (std::size_t i = 0; i < 4; ++i) r.e[i] = e[i] + o.e[i];
  return r;
}

DimensionVector DimensionVector::operator*(double s) const {
  DimensionVector r;
  for (std::size_t i = 0; i < 4; ++i) r.e[i] = e[i] * s;
  return r;
}

bool DimensionVector::operator==(const DimensionVector& o) const {
  for (std::size_t i = 0; i < 4; ++i)
    if (std::abs(e[i] - o.e[i]) > 1e-12) return false;
  return true;
}

std::string DimensionVector::to_string() const {
  std::ostringstream os;
  bool any = false;
  for (std::size_t i = 0; i < 4; ++i) {
    if (std::abs(e[i]) < 5e-3) continue;
    if (any) os << ' ';
    os << kBaseUnits[i];
    if (std::abs(e[i] - 1.0) >= 5e-3) {
      os << '^';
      os.precision(2);
      os << std::fixed << e[i];
      os.unsetf(std::ios::floatfield);
    }
    any = true;
  }
  return any ? os.str() : "1";
}

QuantityTable QuantityTable::standard(double t0_celsius) {
  QuantityTable t;
  t.t0 = t0_celsius;
  // Dataset units: W, mm/s, um, um, g/cm3, J/(kg K), 1e-6/K, W/(m K), deg C.
  t.quantities = {
      {"P", "beam_power", {{1, 2, -3, 0}}, 1.0, 0.0},
      {"V", "scan_speed", {{0, 1, -1, 0}}, 1e-3, 0.0},
      {"L", "layer_thickness", {{0, 1, 0, 0}}, 1e-6, 0.0},
      {"B", "beam_diameter", {{0, 1, 0, 0}}, 1e-6, 0.0},
      {"rho", "density", {{1, -3, 0, 0}}, 1e3, 0.0},
      {"Cp", "specific_heat", {{0, 2, -2, -1}}, 1.0, 0.0},
      {"CTE", "cte", {{0, 0, 0, -1}}, 1e-6, 0.0},
      {"k", "thermal_conductivity", {{1, 1, -3, -1}}, 1.0, 0.0},
      // A temperature difference has the same size in K and deg C.
      {"dT", "melting_point", {{0, 0, 0, 1}}, 1.0, t0_celsius},
  };
  return t;
}

Eigen::VectorXd Constraints::residuals(const Eigen::VectorXd& w) const {
  if (a.rows() == 0) return Eigen::VectorXd();
  return a * w - b;
}

Constraints derive_constraints(const QuantityTable& table, const DimensionVector& target,
                               bool printed_form) {
  const auto n = static_cast<Eigen::Index>(table.size());
  Constraints c;
  c.a.resize(4, n);
  c.b.resize(4);
  for (Eigen::Index u = 0; u < 4; ++u) {
    for (Eigen::Index i = 0; i < n; ++i)
      c.a(u, i) = table.quantities[static_cast<std::size_t>(i)].dim.e[static_cast<std::size_t>(u)];
    c.b(u) = target.e[static_cast<std::size_t>(u)];
    c.names.emplace_back(kBaseUnits[static_cast<std::size_t>(u)]);
  }
  if (printed_form) {
    // The printed temperature balance carries +w_Cp although Cp has K^-1.
    for (Eigen::Index i = 0; i < n; ++i)
      if (table.quantities[static_cast<std::size_t>(i)].symbol == "Cp") c.a(3, i) = -c.a(3, i);
  }
  // Drop base units that no quantity and not the target use (all-zero rows).
  Eigen::Index keep = 0;
  Constraints out;
  out.a.resize(4, n);
  out.b.resize(4);
  for (Eigen::Index u = 0; u < 4; ++u) {
    if (c.a.row(u).cwiseAbs().maxCoeff() == 0.0) {
      if (c.b(u) != 0.0)
        throw ValidationError(std::string("target unit has ") + kBaseUnits[static_cast<std::size_t>(u)] +
                              " but no quantity carries it");
      continue;
    }
    out.a.row(keep) = c.a.row(u);
    out.b(keep) = c.b(u);
    out.names.push_back(c.names[static_cast<std::size_t>(u)]);
    ++keep;
  }
  out.a.conservativeResize(keep, n);
  out.b.conservativeResize(keep);
  return out;
}

Constraints unconstrained(std::size_t n) {
  Constraints c;
  c.a.resize(0, static_cast<Eigen::Index>(n));
  c.b.resize(0);
  return c;
}

DimensionVector label_dimension(LabelKind label) {
  switch (label) {
    case LabelKind::ys:
    case LabelKind::uts:
    case LabelKind::e_mod:
      return kPascal;
    default:
      throw ValidationError("label '" + std::string(to_string(label)) +
                            "' has no stress dimension; equation discovery supports ys, uts and e_mod");
  }
}

double label_to_si(LabelKind label) {
  switch (label) {
    case LabelKind::ys:
    case LabelKind::uts:
      return 1e6;  // MPa
    case LabelKind::e_mod:
      return 1e9;  // GPa
    default:
      label_dimension(label);
      return 1.0;
  }
}

}  // namespace mamprop
