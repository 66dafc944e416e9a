#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mamprop/data.hpp"

namespace mamprop {

/// L-PBF alloys with complete thermal data used by the generators. Invar36 is left out:
/// its CTE of 1.5e-6/K sends CTE^-0.94 laws an order of magnitude off every other alloy.
const std::vector<std::string>& synthetic_material_pool();

/// As-built yield-strength power law over (P, V, L, B, rho, Cp, CTE, k, Tm - T0), SI units.
/// The exponents are the published ones; the multiplier is calibrated so that the pool
/// median at mid-range parameters is 900 MPa.
struct SyntheticLaw {
  std::vector<double> exponents;
  double w0 = 1.0;  ///< gives Pa
  double t0 = 25.0;
};
SyntheticLaw as_built_ys_law(const MaterialRegistry& registry);

struct PowerLawBenchmarkOptions {
  std::size_t n_records = 800;
  double noise = 0.01;  ///< multiplicative, relative std
  std::uint64_t seed = 0;
};

/// As-built L-PBF records whose yield strength follows as_built_ys_law with
/// multiplicative Gaussian noise.
Dataset generate_powerlaw_benchmark(std::shared_ptr<const MaterialRegistry> registry,
                                    const PowerLawBenchmarkOptions& opts = {});

struct BenchmarkOptions {
  std::size_t n_records = 1600;
  std::uint64_t seed = 0;
};

/// A literature-shaped sample: label counts 1218 YS, 1244 UTS, 432 E, 1198 elongation,
/// 293 HV, 230 HRC, 218 Rz for 1600 records (scaled proportionally otherwise). Row 300
/// is the Ti6Al4V ELI, EOS M4OO SF, 1000 W, 30 um as-built part.
Dataset generate_benchmark(std::shared_ptr<const MaterialRegistry> registry,
                           const BenchmarkOptions& opts = {});

/// SI rows (same column order as QuantityTable::standard) with y = 2 rho Cp (Tm - T0)
/// times (1 + noise * N(0,1)). Materials are the first `n_materials` of the pool.
struct OracleData {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> materials;
};
OracleData generate_oracle(const MaterialRegistry& registry, std::size_t n_rows,
                           std::size_t n_materials, double noise, std::uint64_t seed,
                           double t0 = 25.0);

/// The oracle as as-built L-PBF records with the law's value stored as yield strength
/// (MPa), so it can go through the dataset pipeline and the CLI.
Dataset oracle_dataset(std::shared_ptr<const MaterialRegistry> registry, std::size_t n_rows,
                       std::size_t n_materials, double noise, std::uint64_t seed,
                       double t0 = 25.0);

}  // namespace mamprop
