#include <cmath>
#include <cstdio>
#include <limits>

#include "mamprop/eqdiscovery.hpp"
#include "mamprop/error.hpp"
#include "mamprop/evaluation.hpp"
#include "mamprop/parallel.hpp"
#include "mamprop/rng.hpp"

namespace mamprop {
namespace {

// theta = (log w0, w_1..w_n); feasible set theta_p + span(null).
struct Reduced {
  Eigen::MatrixXd a_full;  // constraints on theta (first column zero)
  Eigen::VectorXd b;
  Eigen::VectorXd theta_p;
  Eigen::MatrixXd null;
};

Reduced reduce(const Constraints& c, Eigen::Index n) {
  if (c.a.cols() != n)
    throw ValidationError("constraints cover " + std::to_string(c.a.cols()) + " exponents, data has " +
                          std::to_string(n));
  Reduced r;
  const Eigen::Index m = c.a.rows();
  r.a_full = Eigen::MatrixXd::Zero(m, n + 1);
  r.a_full.rightCols(n) = c.a;
  r.b = c.b;
  if (m == 0) {
    r.theta_p = Eigen::VectorXd::Zero(n + 1);
    r.null = Eigen::MatrixXd::Identity(n + 1, n + 1);
    return r;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(c.a);
  if (rank_check.rank() < m) throw ValidationError("dimensional constraints are linearly dependent");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(r.a_full.transpose());
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n + 1, n + 1);
  const Eigen::MatrixXd rr = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  const Eigen::VectorXd u = rr.transpose().triangularView<Eigen::Lower>().solve(r.b);
  r.theta_p = q.leftCols(m) * u;
  r.null = q.rightCols(n + 1 - m);
  return r;
}

// Removes the rounding drift off the constraint surface.
void project(const Reduced& r, Eigen::VectorXd& theta) {
  if (r.a_full.rows() == 0) return;
  const Eigen::VectorXd viol = r.a_full * theta - r.b;
  const Eigen::MatrixXd aat = r.a_full * r.a_full.transpose();
  theta -= r.a_full.transpose() * aat.ldlt().solve(viol);
}

Eigen::MatrixXd log_design(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw ValidationError("power-law data: row count mismatch");
  if (x.rows() == 0) throw ValidationError("power-law data: no rows");
  if ((x.array() <= 0.0).any() || !x.allFinite())
    throw ValidationError("power-law data: every quantity must be positive and finite");
  if ((y.array() <= 0.0).any() || !y.allFinite())
    throw ValidationError("power-law data: every target must be positive and finite");
  Eigen::MatrixXd d(x.rows(), x.cols() + 1);
  d.col(0).setOnes();
  d.rightCols(x.cols()) = x.array().log().matrix();
  return d;
}

struct LmResult {
  Eigen::VectorXd theta;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;
};

LmResult levenberg_marquardt(const Eigen::MatrixXd& d, const Eigen::VectorXd& y, const Reduced& red,
                             Eigen::VectorXd theta, const PowerLawOptions& opts) {
  const double scale = y.squaredNorm();
  auto objective = [&](const Eigen::VectorXd& th) {
    const Eigen::VectorXd f = (d * th).array().exp().matrix();
    const double v = (f - y).squaredNorm() / scale;
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  const Eigen::MatrixXd dn = d * red.null;
  LmResult res;
  double obj = objective(theta);
  if (!std::isfinite(obj)) {
    res.theta = theta;
    res.objective = obj;
    return res;
  }
  res.trace.push_back(obj);
  double mu = 1e-3;
  for (int it = 0; it < opts.max_iter; ++it) {
    res.iterations = it + 1;
    const Eigen::VectorXd f = (d * theta).array().exp().matrix();
    const Eigen::VectorXd r = f - y;
    const Eigen::MatrixXd j = f.asDiagonal() * dn;
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() <= 1e-15 * scale) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    while (mu < 1e16) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += mu * jtj.diagonal().cwiseMax(1e-300);
      const Eigen::VectorXd step = lhs.ldlt().solve(-g);
      Eigen::VectorXd cand = theta + red.null * step;
      const double cand_obj = objective(cand);
      if (cand_obj < obj) {
        const double drop = obj - cand_obj;
        theta = std::move(cand);
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        const bool small = drop <= opts.tol * obj;
        obj = cand_obj;
        res.trace.push_back(obj);
        if (small) res.converged = true;
        break;
      }
      mu *= 4.0;
    }
    // No descent direction left at working precision: a stationary point.
    if (!accepted) res.converged = true;
    if (res.converged) break;
  }
  project(red, theta);
  res.theta = theta;
  res.objective = objective(theta);
  return res;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

LogLinearFit fit_loglinear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Constraints& c) {
  const Eigen::MatrixXd d = log_design(x, y);
  const Eigen::VectorXd ly = y.array().log().matrix();
  const Reduced red = reduce(c, x.cols());
  const Eigen::MatrixXd m = d * red.null;
  if (m.rows() < m.cols())
    throw ValidationError("power-law fit needs at least " + std::to_string(m.cols()) + " rows, got " +
                          std::to_string(m.rows()));
  // Column equilibration keeps the rank test meaningful when log scales differ.
  Eigen::VectorXd norms = m.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < norms.size(); ++j)
    if (norms(j) == 0.0) norms(j) = 1.0;
  const Eigen::MatrixXd ms = m * norms.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ms);
  qr.setThreshold(1e-10);
  if (qr.rank() < ms.cols())
    throw ValidationError("power-law design is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                          std::to_string(ms.cols()) + "); quantities are collinear in log space");
  const Eigen::VectorXd z = norms.cwiseInverse().asDiagonal() * qr.solve(ly - d * red.theta_p);
  Eigen::VectorXd theta = red.theta_p + red.null * z;
  project(red, theta);

  LogLinearFit fit;
  fit.w0 = std::exp(theta(0));
  fit.w = theta.tail(x.cols());
  const Eigen::VectorXd pred_log = d * theta;
  fit.log_r2 = r2(ly, pred_log);
  fit.r2 = r2(y, pred_log.array().exp().matrix());
  const Eigen::VectorXd grad = d.transpose() * (pred_log - ly);
  fit.kkt_residual = (red.null.transpose() * grad).lpNorm<Eigen::Infinity>() / static_cast<double>(x.rows());
  return fit;
}

PowerLawModel fit_powerlaw(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const QuantityTable& table,
                           const Constraints& c, const PowerLawOptions& opts) {
  if (static_cast<std::size_t>(x.cols()) != table.size())
    throw ValidationError("power-law data has " + std::to_string(x.cols()) + " columns, table has " +
                          std::to_string(table.size()));
  if (opts.n_starts < 1) throw ValidationError("power-law fit needs at least one start");
  const LogLinearFit init = fit_loglinear(x, y, c);
  const Eigen::MatrixXd d = log_design(x, y);
  const Reduced red = reduce(c, x.cols());

  Eigen::VectorXd theta0(x.cols() + 1);
  theta0(0) = std::log(init.w0);
  theta0.tail(x.cols()) = init.w;

  const auto n_starts = static_cast<std::size_t>(opts.n_starts);
  std::vector<LmResult> runs(n_starts);
  parallel_for(n_starts, [&](std::size_t s) {
    Eigen::VectorXd start = theta0;
    if (s > 0) {
      Rng rng(derive_seed(opts.seed, {s}));
      Eigen::VectorXd z(red.null.cols());
      for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = opts.perturbation * rng.normal();
      start += red.null * z;
    }
    runs[s] = levenberg_marquardt(d, y, red, start, opts);
  });

  std::size_t best = 0;
  for (std::size_t s = 1; s < n_starts; ++s)
    if (runs[s].objective < runs[best].objective) best = s;
  const LmResult& r = runs[best];
  if (!std::isfinite(r.objective)) throw ConvergenceError("power-law fit diverged from every start");

  PowerLawModel m;
  for (const auto& q : table.quantities) m.symbols.push_back(q.symbol);
  m.w0 = std::exp(r.theta(0));
  m.w = r.theta.tail(x.cols());
  m.init_r2 = init.r2;
  m.fit_r2 = r2(y, (d * r.theta).array().exp().matrix());
  m.constraint_residuals = c.residuals(m.w);
  m.constraint_names = c.names;
  m.converged = r.converged;
  m.iterations = r.iterations;
  m.best_start = best;
  m.n_rows = static_cast<std::size_t>(x.rows());
  m.objective_trace = r.trace;
  DimensionVector w0_dim;
  for (std::size_t u = 0; u < c.names.size(); ++u)
    for (std::size_t b = 0; b < 4; ++b)
      if (c.names[u] == kBaseUnits[b]) w0_dim.e[b] = -m.constraint_residuals(static_cast<Eigen::Index>(u));
  m.w0_unit = w0_dim.to_string();
  return m;
}

Eigen::VectorXd evaluate_powerlaw(const PowerLawModel& m, const Eigen::MatrixXd& x) {
  if (x.cols() != m.w.size())
    throw ValidationError("power law has " + std::to_string(m.w.size()) + " exponents, data has " +
                          std::to_string(x.cols()) + " columns");
  if (!(x.array() > 0.0).all()) throw ValidationError("power law needs strictly positive quantities");
  return (m.w0 * (x.array().log().matrix() * m.w).array().exp()).matrix();
}

double powerlaw_r2(const PowerLawModel& m, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return r2(y, evaluate_powerlaw(m, x));
}

std::string PowerLawModel::equation() const {
  std::string s = (label.empty() ? std::string("y") : label) + " [" + target_unit + "] = " + fmt("%.4g", w0);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const std::string& sym = static_cast<std::size_t>(i) < symbols.size() ? symbols[static_cast<std::size_t>(i)]
                                                                         : "x" + std::to_string(i + 1);
    s += " * " + sym + "^" + fmt("%.2f", w(i));
  }
  return s;
}

nlohmann::json PowerLawModel::to_json() const {
  nlohmann::json j;
  j["label"] = label;
  j["condition"] = condition;
  j["target_unit"] = target_unit;
  j["equation"] = equation();
  j["w0"] = w0;
  j["w0_unit"] = w0_unit;
  nlohmann::json ex = nlohmann::json::object();
  nlohmann::json order = nlohmann::json::array();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const std::string sym = static_cast<std::size_t>(i) < symbols.size() ? symbols[static_cast<std::size_t>(i)]
                                                                        : "x" + std::to_string(i + 1);
    ex[sym] = w(i);
    order.push_back(sym);
  }
  j["exponents"] = ex;
  j["symbols"] = order;
  nlohmann::json res = nlohmann::json::object();
  for (std::size_t u = 0; u < constraint_names.size(); ++u)
    res[constraint_names[u]] = constraint_residuals(static_cast<Eigen::Index>(u));
  j["constraint_residuals"] = res;
  j["fit_r2"] = fit_r2;
  j["init_r2"] = init_r2;
  j["converged"] = converged;
  j["iterations"] = iterations;
  j["best_start"] = best_start;
  j["n_rows"] = n_rows;
  j["objective_trace"] = objective_trace;
  return j;
}

}  // namespace mamprop
