#include "core/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/spectral.hpp"

namespace chinpaint {

FidelityField FidelityField::from_control(const Field& lambda0, const Field& mask_D, double lambda_min,
                                          double lambda_max) {
  require_same_grid(lambda0.grid(), mask_D.grid(), "FidelityField");
  require_binary_mask(mask_D);
  if (!(lambda_min > 0.0) || !(lambda_min < lambda_max))
    throw Error(ErrorCode::InvalidArgument, "control box needs 0 < lambda_min < lambda_max");
  FidelityField fid{Field(lambda0.grid()), mask_D, lambda_min, lambda_max};
  for (std::size_t k = 0; k < lambda0.size(); ++k) {
    if (mask_D[k] == 1.0) continue;
    const double v = lambda0[k];
    if (!(v >= lambda_min && v <= lambda_max))
      throw Error(ErrorCode::BoxViolation,
                  "lambda0 = " + num(v) + " outside [" + num(lambda_min) + ", " +
                      num(lambda_max) + "]");
    fid.lambda[k] = v;
  }
  return fid;
}

FidelityField FidelityField::constant(double lambda0, const Field& mask_D) {
  require_binary_mask(mask_D);
  if (!(lambda0 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda0 must be nonnegative");
  FidelityField fid{Field(mask_D.grid()), mask_D, lambda0, lambda0};
  for (std::size_t k = 0; k < mask_D.size(); ++k) fid.lambda[k] = mask_D[k] == 1.0 ? 0.0 : lambda0;
  return fid;
}

Field FidelityField::undamaged() const {
  Field chi(mask_D.grid());
  for (std::size_t k = 0; k < chi.size(); ++k) chi[k] = 1.0 - mask_D[k];
  return chi;
}

StepResult step(const StepOperators& ops, const Field& phi_n, const Field& lambda_f, const Potential& potential) {
  const std::uint64_t clamps_before = potential.clamp_events();
  const Field f1 = sample_F1d(potential, phi_n);
  const std::uint64_t clamps = potential.clamp_events() - clamps_before;

  Field rhs = ops.explicit_part(phi_n, f1);
  rhs.axpy(ops.dt(), lambda_f);
  LinearSolveStats stats;
  StepResult out;
  out.phi = ops.solve_K(rhs, &phi_n, &stats);
  if (!out.phi.all_finite()) throw Error(ErrorCode::NonFinite, "state became non-finite");
  out.mu = chemical_potential(out.phi, potential);
  out.picard_iterations = stats.iterations;
  out.clamp_events = clamps;
  return out;
}

StepResult step(const Field& phi_n, const FidelityField& fidelity, const Field& f, const SolverConfig& cfg,
                const Potential& potential) {
  require_same_grid(phi_n.grid(), f.grid(), "step");
  StepOperators ops(phi_n.grid(), cfg, potential, fidelity.lambda);
  return step(ops, phi_n, hadamard(fidelity.lambda, f), potential);
}

namespace {

StepDiagnostics diagnose(int n, double t, const Field& phi, const Potential& potential) {
  StepDiagnostics d;
  d.step = n;
  d.time = t;
  // energy() evaluates F and may clamp; keep those out of the step tally.
  Potential quiet(potential);
  d.energy = energy(phi, quiet);
  d.mass = mean(phi);
  d.min_phi = phi.min();
  d.max_phi = phi.max();
  return d;
}

}  // namespace

Trajectory solve(const Field& phi0, const FidelityField& fidelity, const Field& f, const SolverConfig& cfg,
                 const Potential& potential) {
  cfg.validate();
  require_same_grid(phi0.grid(), f.grid(), "solve");
  require_same_grid(phi0.grid(), fidelity.lambda.grid(), "solve");
  if (!phi0.all_finite()) throw Error(ErrorCode::NonFinite, "initial state is not finite");
  if (phi0.max_abs() > 1.0) throw Error(ErrorCode::InvalidArgument, "initial state must satisfy |phi0| <= 1");
  if (!(std::abs(mean(phi0)) < 1.0)) throw Error(ErrorCode::InvalidArgument, "initial mean must lie in (-1, 1)");

  Trajectory traj;
  traj.grid = phi0.grid();
  traj.dt = cfg.dt;
  traj.states.reserve(cfg.n_steps + 1);
  traj.states.push_back(phi0);
  traj.mus.push_back(chemical_potential(phi0, Potential(potential)));
  traj.diagnostics.push_back(diagnose(0, 0.0, phi0, potential));

  const StepOperators ops(phi0.grid(), cfg, potential, fidelity.lambda);
  const Field lambda_f = hadamard(fidelity.lambda, f);
  for (int n = 0; n < cfg.n_steps; ++n) {
    StepResult r = step(ops, traj.states.back(), lambda_f, potential);
    StepDiagnostics d = diagnose(n + 1, traj.time(n + 1), r.phi, potential);
    d.clamp_events = r.clamp_events;
    d.picard_iterations = r.picard_iterations;
    traj.diagnostics.push_back(d);
    traj.states.push_back(std::move(r.phi));
    traj.mus.push_back(std::move(r.mu));
  }
  return traj;
}

Field chemical_potential(const Field& phi, const Potential& potential) {
  const double eps = potential.params().eps;
  Field mu = laplacian(phi);
  mu *= -eps;
  for (std::size_t k = 0; k < mu.size(); ++k) mu[k] += potential.F1d(phi[k]) / eps;
  return mu;
}

double energy(const Field& phi, const Potential& potential) {
  const double eps = potential.params().eps;
  double bulk = 0.0;
  for (double v : phi.values()) bulk += potential.F(v);
  bulk *= phi.grid().cell_area();
  return 0.5 * eps * gradient_norm_sq(phi) + bulk / eps;
}

double mass_balance_residual(const Trajectory& traj, const FidelityField& fidelity, const Field& f) {
  double worst = 0.0;
  for (int n = 0; n + 1 < static_cast<int>(traj.states.size()); ++n) {
    const Field& next = traj.states[n + 1];
    Field source(next.grid());
    for (std::size_t k = 0; k < source.size(); ++k) source[k] = fidelity.lambda[k] * (f[k] - next[k]);
    const double r = (mean(next) - mean(traj.states[n])) / traj.dt - mean(source);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double state_lipschitz_ratio(const FidelityField& lambda1, const FidelityField& lambda2, const Field& phi0,
                             const Field& f, const SolverConfig& cfg, const Potential& potential) {
  const double dist = l2_norm(lambda1.lambda - lambda2.lambda);
  if (dist == 0.0) return 0.0;
  const Trajectory s1 = solve(phi0, lambda1, f, cfg, potential);
  const Trajectory s2 = solve(phi0, lambda2, f, cfg, potential);
  double worst = 0.0;
  for (std::size_t n = 0; n < s1.states.size(); ++n) worst = std::max(worst, l2_norm(s1.states[n] - s2.states[n]));
  return worst / dist;
}

}  // namespace chinpaint
