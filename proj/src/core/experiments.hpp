#pragma once

#include <vector>

#include "core/forward.hpp"

namespace chinpaint {

struct TargetConfig {
  double lambda_big = 1e4;
  double stat_tol = 1e-6;  // on ||phi^{n+1} - phi^n||_{L2} / dt
  int max_steps = 200000;
  // After the large-lambda phase, relax with lambda = 0 until stationary so
  // that -Lap(-eps Lap f + F'(f)/eps) = 0 holds on all of Omega.
  bool relax = true;
};

struct TargetResult {
  Field f_tilde;
  int steps = 0;            // both phases
  double stationarity = 0.0;
  // ||Lap(-eps Lap f + F'(f)/eps)||_{L2} over interior cells of Omega\D
  double euler_lagrange_residual = 0.0;
};

// Whole-domain surrogate for the regularised target: a near-stationary state
// of the solver with a large constant fidelity on Omega\D. Throws
// NotStationary if max_steps is reached.
TargetResult regularized_target(const Field& f_raw, const Field& mask_D, const PotentialParams& params,
                                const SolverConfig& cfg, const TargetConfig& tcfg = {});

double euler_lagrange_residual(const Field& phi, const Field& mask_D, const Potential& potential);

struct LogLinearFit {
  double rate = 0.0;       // -slope of log y against t
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least squares fit of log(y) = intercept - rate t; y must be positive.
LogLinearFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y);

struct DecayConfig {
  SolverConfig cfg;     // n_steps per rung; dt * n_steps is the horizon for slow rungs
  double horizon = 15.0;  // rungs with lambda0 > 0 run at most to t = horizon / lambda0
  double floor = 1e-9;    // stop once d(t) <= floor * d(0)
};

struct DecayReport {
  double lambda0 = 0.0;
  double eps = 0.0;
  std::vector<double> times;
  std::vector<double> hminus1_values;  // d(t) = ||chi_{Omega\D} (phi(t) - f_tilde)||_{H^-1}
  double fitted_rate = 0.0;            // over the second half of the recorded window
  double fit_r2 = 0.0;
  double threshold_context = 0.0;      // lambda0 * eps^3, the quantity compared with K
};

// Evolves phi_t = Lap mu + lambda0 chi_{Omega\D} (f_tilde - phi) for each lambda0
// and fits the decay of d(t). This is the whole-domain analogue of the
// subdomain problem (surrogate norm, no boundary matching on dD).
std::vector<DecayReport> decay_experiment(const Field& f_tilde, const Field& phi0, const Field& mask_D,
                                          const std::vector<double>& lambda0_values, const PotentialParams& params,
                                          const DecayConfig& dcfg);

struct EpsilonScanRow {
  double eps = 0.0;
  double fitted_rate = 0.0;
  double fit_r2 = 0.0;
  double target_residual = 0.0;
};

// One decay run per eps at fixed lambda0, each with its own regularised target.
std::vector<EpsilonScanRow> epsilon_threshold_scan(const std::vector<double>& eps_values, double lambda0,
                                                   const Field& f_raw, const Field& phi0, const Field& mask_D,
                                                   const PotentialParams& params, const DecayConfig& dcfg,
                                                   const SolverConfig& target_cfg, const TargetConfig& tcfg = {});

}  // namespace chinpaint
