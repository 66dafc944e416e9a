#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mamprop/data.hpp"

namespace mamprop {

/// Exponents of (kg, m, s, K).
struct DimensionVector {
  std::array<double, 4> e{0.0, 0.0, 0.0, 0.0};

  DimensionVector operator+(const DimensionVector& o) const;
  DimensionVector operator*(double s) const;
  /// Component-wise equality within 1e-12.
  bool operator==(const DimensionVector& o) const;
  std::string to_string() const;
};

inline const DimensionVector kPascal{{1.0, -1.0, -2.0, 0.0}};
inline constexpr std::array<const char*, 4> kBaseUnits = {"kg", "m", "s", "K"};

struct Quantity {
  std::string symbol;        ///< P, V, L, B, rho, Cp, CTE, k, dT
  std::string field;         ///< dataset quantity it is read from
  DimensionVector dim;
  double si_factor = 1.0;    ///< SI value = factor * (dataset value - offset)
  double si_offset = 0.0;
};

struct QuantityTable {
  std::vector<Quantity> quantities;
  double t0 = 25.0;  ///< ambient reference temperature, deg C

  /// The nine quantities P, V, L, B, rho, Cp, CTE, k, Tm - T0 with their dimensions.
  static QuantityTable standard(double t0_celsius = 25.0);
  std::size_t size() const { return quantities.size(); }
};

/// Linear equality constraints a * w = b over the exponents w_1..w_n, one per base unit.
struct Constraints {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::vector<std::string> names;

  /// a * w - b.
  Eigen::VectorXd residuals(const Eigen::VectorXd& w) const;
  std::size_t size() const { return static_cast<std::size_t>(a.rows()); }
};

/// sum_i w_i * dim_i[u] = target[u] for every base unit u. With `printed_form` the
/// temperature row uses +w_6 as printed in the source instead of the table-derived -w_6.
Constraints derive_constraints(const QuantityTable& table, const DimensionVector& target,
                               bool printed_form = false);
/// No constraints on n exponents (for comparison fits).
Constraints unconstrained(std::size_t n);

struct LogLinearFit {
  double w0 = 1.0;
  Eigen::VectorXd w;
  double log_r2 = 0.0;  ///< R^2 of log y
  double r2 = 0.0;      ///< R^2 in original units
  /// Stationarity check: largest component of the log-space gradient left after
  /// projecting out the constraint normals.
  double kkt_residual = 0.0;
};

/// Least squares of log y on [1, log x] subject to the constraints, solved in closed form
/// by eliminating the constrained directions. Throws ValidationError for non-positive
/// inputs or a rank-deficient design (collinear quantities).
LogLinearFit fit_loglinear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Constraints& c);

struct PowerLawOptions {
  int max_iter = 200;
  double tol = 1e-12;  ///< relative objective decrease that counts as converged
  int n_starts = 8;
  double perturbation = 0.1;
  std::uint64_t seed = 0;
};

struct PowerLawModel {
  std::string label;
  std::string condition;
  std::string target_unit = "Pa";
  std::vector<std::string> symbols;
  double w0 = 1.0;
  Eigen::VectorXd w;
  double fit_r2 = 0.0;
  double init_r2 = 0.0;  ///< log-linear starting point
  Eigen::VectorXd constraint_residuals;
  std::vector<std::string> constraint_names;
  bool converged = false;
  int iterations = 0;
  std::size_t best_start = 0;
  std::size_t n_rows = 0;
  std::vector<double> objective_trace;  ///< accepted objective values of the best start
  std::string w0_unit;                  ///< SI unit that makes the equation balance

  std::string equation() const;
  nlohmann::json to_json() const;
};

/// Minimizes sum (y - w0 prod x_i^w_i)^2 subject to the constraints: Levenberg-Marquardt
/// steps restricted to the constraint null space from the log-linear solution and
/// perturbed restarts; the best objective wins, ties by start index.
PowerLawModel fit_powerlaw(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const QuantityTable& table, const Constraints& c,
                           const PowerLawOptions& opts = {});

Eigen::VectorXd evaluate_powerlaw(const PowerLawModel& m, const Eigen::MatrixXd& x);
double powerlaw_r2(const PowerLawModel& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Records with every quantity of the table and the label, optionally restricted to one
/// post-processing condition, converted to SI (labels in Pa).
struct PowerLawData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::size_t> records;
};
PowerLawData powerlaw_data(const Dataset& ds, LabelKind label, const std::optional<std::string>& condition,
                           const QuantityTable& table);
/// Dimension of a label; ValidationError for labels without a physical dimension here.
DimensionVector label_dimension(LabelKind label);
double label_to_si(LabelKind label);

}  // namespace mamprop
