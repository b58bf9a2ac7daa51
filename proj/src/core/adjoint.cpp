#include "core/adjoint.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/sensitivity.hpp"
#include "core/spectral.hpp"

namespace chinpaint {

void CostWeights::validate() const {
  if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0) || !(beta >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "cost weights must be nonnegative");
  if (alpha1 == 0.0 && alpha2 == 0.0 && beta == 0.0)
    throw Error(ErrorCode::InvalidArgument, "alpha1, alpha2 and beta must not all be zero");
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "penalty exponent r must be positive");
}

double trapezoid_weight(int n, int n_steps) { return (n == 0 || n == n_steps) ? 0.5 : 1.0; }

Trajectory solve_backward_general(const Trajectory& traj_bar, const FidelityField& lambda_bar,
                                  const AdjointSources& sources, const SolverConfig& cfg, const Potential& potential) {
  require_matching_trajectory(traj_bar, cfg, "backward solve");
  require_same_grid(traj_bar.grid, lambda_bar.lambda.grid(), "backward solve");
  const int N = cfg.n_steps;
  if (!sources.g3.empty() && sources.g3.size() != static_cast<std::size_t>(N) + 1)
    throw Error(ErrorCode::TrajectoryMismatch, "backward sources must cover every time node");
  if (sources.g4) require_same_grid(traj_bar.grid, sources.g4->grid(), "backward solve");

  const StepOperators ops(traj_bar.grid, cfg, potential, lambda_bar.lambda);
  const double dt = cfg.dt;
  Potential quiet(potential);

  Trajectory out;
  out.grid = traj_bar.grid;
  out.dt = traj_bar.dt;
  out.t0 = traj_bar.t0;
  out.states.assign(N + 1, Field(traj_bar.grid));

  for (int n = N; n >= 0; --n) {
    Field rhs = (n == N) ? Field(traj_bar.grid) : ops.apply_BT(out.states[n + 1], sample_F2d(quiet, traj_bar.states[n]));
    if (!sources.g3.empty()) rhs.axpy(dt * trapezoid_weight(n, N), sources.g3[n]);
    if (n == N && sources.g4) rhs += *sources.g4;
    out.states[n] = ops.solve_K(rhs, nullptr);
  }
  return out;
}

Trajectory solve_adjoint(const Trajectory& traj_bar, const FidelityField& lambda_bar, const Field& f,
                         const CostWeights& weights, const SolverConfig& cfg, const Potential& potential) {
  weights.validate();
  require_matching_trajectory(traj_bar, cfg, "solve_adjoint");
  const Field chi = lambda_bar.undamaged();
  AdjointSources src;
  if (weights.alpha1 != 0.0) {
    src.g3.reserve(traj_bar.states.size());
    for (const Field& phi : traj_bar.states) {
      Field g(phi.grid());
      for (std::size_t k = 0; k < g.size(); ++k) g[k] = weights.alpha1 * chi[k] * (phi[k] - f[k]);
      src.g3.push_back(std::move(g));
    }
  }
  if (weights.alpha2 != 0.0) {
    const Field& phi = traj_bar.states.back();
    Field g(phi.grid());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = weights.alpha2 * chi[k] * (phi[k] - f[k]);
    src.g4 = std::move(g);
  }
  return solve_backward_general(traj_bar, lambda_bar, src, cfg, potential);
}

Field adjoint_q(const Field& p, const Potential& potential) {
  Field q = laplacian(p);
  q *= -potential.params().eps;
  return q;
}

Trajectory solve_linearized_adjoint(const Trajectory& traj_bar, const Trajectory& adj_bar, const Trajectory& xi,
                                    const FidelityField& lambda_bar, const Field& h, const CostWeights& weights,
                                    const SolverConfig& cfg, const Potential& potential) {
  if (weights.alpha2 != 0.0)
    throw Error(ErrorCode::Alpha2NotZero, "second-order adjoint paths require alpha2 = 0");
  require_matching_trajectory(traj_bar, cfg, "solve_linearized_adjoint");
  require_matching_trajectory(adj_bar, cfg, "solve_linearized_adjoint");
  require_matching_trajectory(xi, cfg, "solve_linearized_adjoint");
  const int N = cfg.n_steps;
  const double eps = potential.params().eps;
  const Field chi = lambda_bar.undamaged();
  Potential quiet(potential);

  // Dividing by the trapezoid weight (1 or 1/2) is exact, so the weighted
  // source dt w_n g3^n reproduces the exact discrete derivative.
  AdjointSources src;
  src.g3.reserve(N + 1);
  for (int n = 0; n <= N; ++n) {
    const double inv_w = 1.0 / trapezoid_weight(n, N);
    const Field& x = xi.states[n];
    const Field& p = adj_bar.states[n];
    Field g(x.grid());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = weights.alpha1 * chi[k] * x[k] - inv_w * h[k] * p[k];
    if (n < N) {
      const Field lp = laplacian(adj_bar.states[n + 1]);
      const Field f3 = sample_F3d(quiet, traj_bar.states[n]);
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += inv_w * f3[k] * x[k] * lp[k] / eps;
    }
    src.g3.push_back(std::move(g));
  }
  return solve_backward_general(traj_bar, lambda_bar, src, cfg, potential);
}

double costate_lipschitz_ratio(const FidelityField& lambda1, const FidelityField& lambda2, const Field& phi0,
                               const Field& f, const CostWeights& weights, const SolverConfig& cfg,
                               const Potential& potential) {
  const double dist = l2_norm(lambda1.lambda - lambda2.lambda);
  if (dist == 0.0) return 0.0;
  const Trajectory s1 = solve(phi0, lambda1, f, cfg, potential);
  const Trajectory s2 = solve(phi0, lambda2, f, cfg, potential);
  const Trajectory p1 = solve_adjoint(s1, lambda1, f, weights, cfg, potential);
  const Trajectory p2 = solve_adjoint(s2, lambda2, f, weights, cfg, potential);
  return max_l2_distance(p1.states, p2.states) / dist;
}

}  // namespace chinpaint
