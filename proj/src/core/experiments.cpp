#include "core/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/spectral.hpp"

namespace chinpaint {

namespace {

// Steps until ||phi^{n+1} - phi^n|| / dt <= tol; returns the steps taken.
int march_to_stationary(Field& phi, const FidelityField& fid, const Field& target, const SolverConfig& cfg,
                        const Potential& potential, double tol, int max_steps, double& last_rate) {
  const StepOperators ops(phi.grid(), cfg, potential, fid.lambda);
  const Field lambda_f = hadamard(fid.lambda, target);
  for (int n = 1; n <= max_steps; ++n) {
    StepResult r = step(ops, phi, lambda_f, potential);
    last_rate = l2_norm(r.phi - phi) / cfg.dt;
    phi = std::move(r.phi);
    if (last_rate <= tol) return n;
  }
  throw Error(ErrorCode::NotStationary, "no stationary state after " + std::to_string(max_steps) +
                                            " steps (rate " + num(last_rate) + ")");
}

}  // namespace

double euler_lagrange_residual(const Field& phi, const Field& mask_D, const Potential& potential) {
  const Field r = laplacian(chemical_potential(phi, potential));
  const Grid& g = phi.grid();
  auto undamaged = [&](int i, int j) {
    i = std::clamp(i, 0, g.nx - 1);
    j = std::clamp(j, 0, g.ny - 1);
    return mask_D(i, j) == 0.0;
  };
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (undamaged(i, j) && undamaged(i - 1, j) && undamaged(i + 1, j) && undamaged(i, j - 1) && undamaged(i, j + 1))
        s += r(i, j) * r(i, j);
  return std::sqrt(s * g.cell_area());
}

TargetResult regularized_target(const Field& f_raw, const Field& mask_D, const PotentialParams& params,
                                const SolverConfig& cfg, const TargetConfig& tcfg) {
  cfg.validate();
  require_same_grid(f_raw.grid(), mask_D.grid(), "regularized_target");
  const Potential potential(params);
  const double m_star = well_location(params);
  if (f_raw.max_abs() > m_star * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidArgument, "raw target must take values in [-m*, m*]");

  TargetResult res;
  Field phi = f_raw;
  double rate = 0.0;
  res.steps = march_to_stationary(phi, FidelityField::constant(tcfg.lambda_big, mask_D), f_raw, cfg, potential,
                                  tcfg.stat_tol, tcfg.max_steps, rate);
  if (tcfg.relax)
    res.steps += march_to_stationary(phi, FidelityField::constant(0.0, mask_D), f_raw, cfg, potential, tcfg.stat_tol,
                                     tcfg.max_steps, rate);
  res.stationarity = rate;
  res.euler_lagrange_residual = euler_lagrange_residual(phi, mask_D, potential);
  res.f_tilde = std::move(phi);
  return res;
}

LogLinearFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) throw Error(ErrorCode::InvalidArgument, "fit needs at least two samples");
  const double n = static_cast<double>(t.size());
  double st = 0, sl = 0;
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "fit needs positive samples");
    ly[i] = std::log(y[i]);
    st += t[i];
    sl += ly[i];
  }
  const double tm = st / n, lm = sl / n;
  double stt = 0, stl = 0, sll = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    stl += (t[i] - tm) * (ly[i] - lm);
    sll += (ly[i] - lm) * (ly[i] - lm);
  }
  LogLinearFit fit;
  const double slope = stl / stt;
  fit.rate = -slope;
  fit.intercept = lm - slope * tm;
  fit.r2 = sll > 0.0 ? (stl * stl) / (stt * sll) : 1.0;
  return fit;
}

std::vector<DecayReport> decay_experiment(const Field& f_tilde, const Field& phi0, const Field& mask_D,
                                          const std::vector<double>& lambda0_values, const PotentialParams& params,
                                          const DecayConfig& dcfg) {
  dcfg.cfg.validate();
  require_same_grid(f_tilde.grid(), phi0.grid(), "decay_experiment");
  require_same_grid(f_tilde.grid(), mask_D.grid(), "decay_experiment");
  const Potential potential(params);
  Field chi(mask_D.grid());
  for (std::size_t k = 0; k < chi.size(); ++k) chi[k] = 1.0 - mask_D[k];

  std::vector<DecayReport> out;
  for (double lambda0 : lambda0_values) {
    DecayReport rep;
    rep.lambda0 = lambda0;
    rep.eps = params.eps;
    rep.threshold_context = lambda0 * std::pow(params.eps, 3);

    SolverConfig cfg = dcfg.cfg;
    double horizon = cfg.final_time();
    if (lambda0 > 0.0) horizon = std::min(horizon, dcfg.horizon / lambda0);
    cfg.dt = horizon / cfg.n_steps;

    const FidelityField fid = FidelityField::constant(lambda0, mask_D);
    const StepOperators ops(phi0.grid(), cfg, potential, fid.lambda);
    const Field lambda_f = hadamard(fid.lambda, f_tilde);
    Field phi = phi0;
    auto record = [&](int n) {
      rep.times.push_back(n * cfg.dt);
      rep.hminus1_values.push_back(hminus1_norm(hadamard(chi, phi - f_tilde)));
    };
    record(0);
    const double stop = dcfg.floor * rep.hminus1_values.front();
    for (int n = 1; n <= cfg.n_steps && rep.hminus1_values.back() > stop; ++n) {
      phi = step(ops, phi, lambda_f, potential).phi;
      record(n);
    }

    const std::size_t half = rep.times.size() / 2;
    std::vector<double> t(rep.times.begin() + half, rep.times.end());
    std::vector<double> d(rep.hminus1_values.begin() + half, rep.hminus1_values.end());
    bool positive = t.size() >= 2;
    for (double v : d) positive = positive && v > 0.0;
    if (positive) {
      const LogLinearFit fit = fit_exponential(t, d);
      rep.fitted_rate = fit.rate;
      rep.fit_r2 = fit.r2;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<EpsilonScanRow> epsilon_threshold_scan(const std::vector<double>& eps_values, double lambda0,
                                                   const Field& f_raw, const Field& phi0, const Field& mask_D,
                                                   const PotentialParams& params, const DecayConfig& dcfg,
                                                   const SolverConfig& target_cfg, const TargetConfig& tcfg) {
  std::vector<EpsilonScanRow> rows;
  for (double eps : eps_values) {
    PotentialParams p = params;
    p.eps = eps;
    const TargetResult target = regularized_target(f_raw, mask_D, p, target_cfg, tcfg);
    const DecayReport rep = decay_experiment(target.f_tilde, phi0, mask_D, {lambda0}, p, dcfg).front();
    rows.push_back({eps, rep.fitted_rate, rep.fit_r2, target.euler_lagrange_residual});
  }
  return rows;
}

}  // namespace chinpaint
