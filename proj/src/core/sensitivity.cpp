#include "core/sensitivity.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/spectral.hpp"

namespace chinpaint {

void require_matching_trajectory(const Trajectory& traj, const SolverConfig& cfg, const char* where) {
  if (traj.states.empty() || traj.n_steps() != cfg.n_steps || traj.dt != cfg.dt)
    throw Error(ErrorCode::TrajectoryMismatch,
                std::string(where) + ": trajectory has " + std::to_string(traj.n_steps()) + " steps of " +
                    num(traj.dt) + ", config expects " + std::to_string(cfg.n_steps) + " of " +
                    num(cfg.dt));
}

namespace {

using SourceFn = std::function<void(int n_next, Field& rhs)>;

Trajectory march_linear(const Trajectory& traj_bar, const FidelityField& lambda_bar, const SolverConfig& cfg,
                        const Potential& potential, const SourceFn& add_sources) {
  require_matching_trajectory(traj_bar, cfg, "linearised solve");
  require_same_grid(traj_bar.grid, lambda_bar.lambda.grid(), "linearised solve");
  const StepOperators ops(traj_bar.grid, cfg, potential, lambda_bar.lambda);
  Trajectory out;
  out.grid = traj_bar.grid;
  out.dt = traj_bar.dt;
  out.t0 = traj_bar.t0;
  out.states.reserve(traj_bar.states.size());
  out.states.emplace_back(traj_bar.grid);
  Potential quiet(potential);
  for (int n = 0; n < cfg.n_steps; ++n) {
    const Field& xi = out.states.back();
    Field rhs = ops.apply_B(xi, sample_F2d(quiet, traj_bar.states[n]));
    add_sources(n + 1, rhs);
    out.states.push_back(ops.solve_K(rhs, nullptr));
  }
  return out;
}

}  // namespace

Trajectory solve_linear_general(const Trajectory& traj_bar, const FidelityField& lambda_bar,
                                const LinearizedSources& sources, const SolverConfig& cfg,
                                const Potential& potential) {
  const std::size_t nodes = static_cast<std::size_t>(cfg.n_steps) + 1;
  if ((!sources.g1.empty() && sources.g1.size() != nodes) || (!sources.g2.empty() && sources.g2.size() != nodes))
    throw Error(ErrorCode::TrajectoryMismatch, "linearised sources must cover every time node");
  const double dt = cfg.dt;
  std::vector<double> laplace_symbol = neumann_eigenvalues(traj_bar.grid);
  for (double& v : laplace_symbol) v = -v;
  return march_linear(traj_bar, lambda_bar, cfg, potential, [&](int n_next, Field& rhs) {
    if (!sources.g1.empty()) rhs.axpy(dt, sources.g1[n_next]);
    if (!sources.g2.empty()) rhs.axpy(dt, apply_symbol(sources.g2[n_next - 1], laplace_symbol));
  });
}

Trajectory solve_linearized(const Trajectory& traj_bar, const FidelityField& lambda_bar, const Field& h,
                            const Field& f, const SolverConfig& cfg, const Potential& potential) {
  require_same_grid(h.grid(), f.grid(), "solve_linearized");
  const double dt = cfg.dt;
  return march_linear(traj_bar, lambda_bar, cfg, potential, [&](int n_next, Field& rhs) {
    const Field& phi = traj_bar.states[n_next];
    Field g1(h.grid());
    for (std::size_t k = 0; k < g1.size(); ++k) g1[k] = h[k] * (f[k] - phi[k]);
    rhs.axpy(dt, g1);
  });
}

Field linearized_potential(const Field& xi, const Field& phi_bar, const Potential& potential) {
  const double eps = potential.params().eps;
  Field eta = laplacian(xi);
  eta *= -eps;
  for (std::size_t k = 0; k < eta.size(); ++k) eta[k] += potential.F2d(phi_bar[k]) * xi[k] / eps;
  return eta;
}

double max_l2_distance(const std::vector<Field>& a, const std::vector<Field>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::TrajectoryMismatch, "trajectories differ in length");
  double worst = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) worst = std::max(worst, l2_norm(a[n] - b[n]));
  return worst;
}

double max_l2_norm(const std::vector<Field>& a) {
  double worst = 0.0;
  for (const Field& x : a) worst = std::max(worst, l2_norm(x));
  return worst;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TaylorResult taylor_remainder_order(const FidelityField& lambda0, const Field& h, const std::vector<double>& taus,
                                    const Field& phi0, const Field& f, const SolverConfig& cfg,
                                    const Potential& potential) {
  TaylorResult result;
  result.taus = taus;
  std::vector<FidelityField> perturbed;
  for (double tau : taus) {
    Field shifted = lambda0.lambda;
    shifted.axpy(tau, h);
    perturbed.push_back(FidelityField::from_control(shifted, lambda0.mask_D, lambda0.lambda_min, lambda0.lambda_max));
  }

  const Trajectory base = solve(phi0, lambda0, f, cfg, potential);
  const Trajectory xi = solve_linearized(base, lambda0, h, f, cfg, potential);
  bool all_zero = true;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const Trajectory moved = solve(phi0, perturbed[i], f, cfg, potential);
    double worst = 0.0;
    for (std::size_t n = 0; n < base.states.size(); ++n) {
      Field r = moved.states[n] - base.states[n];
      r.axpy(-taus[i], xi.states[n]);
      worst = std::max(worst, l2_norm(r));
    }
    result.remainders.push_back(worst);
    if (worst != 0.0) all_zero = false;
  }
  result.exact = all_zero;
  if (!all_zero) result.observed_order = loglog_slope(result.taus, result.remainders);
  return result;
}

}  // namespace chinpaint
