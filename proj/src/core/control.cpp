#include "core/control.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "core/error.hpp"
#include "core/sensitivity.hpp"
#include "core/spectral.hpp"

namespace chinpaint {

void ControlBox::validate() const {
  if (!(lambda_min > 0.0) || !(lambda_min < lambda_max))
    throw Error(ErrorCode::InvalidArgument, "control box needs 0 < lambda_min < lambda_max");
  require_binary_mask(mask_D);
}

void ControlProblem::validate() const {
  box.validate();
  weights.validate();
  cfg.validate();
  potential.validate();
  require_same_grid(phi0.grid(), f.grid(), "ControlProblem");
  require_same_grid(phi0.grid(), box.mask_D.grid(), "ControlProblem");
}

FidelityField ControlProblem::fidelity(const Field& lambda0) const {
  return FidelityField::from_control(lambda0, box.mask_D, box.lambda_min, box.lambda_max);
}

double cost(const Trajectory& traj, const FidelityField& lambda0, const Field& f, const CostWeights& weights) {
  require_same_grid(traj.grid, f.grid(), "cost");
  const Field chi = lambda0.undamaged();
  const int N = traj.n_steps();
  const double cell = traj.grid.cell_area();
  auto misfit = [&](const Field& phi) {
    double s = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
      const double d = chi[k] * (phi[k] - f[k]);
      s += d * d;
    }
    return s * cell;
  };
  double tracking = 0.0;
  if (weights.alpha1 != 0.0)
    for (int n = 0; n <= N; ++n) tracking += trapezoid_weight(n, N) * traj.dt * misfit(traj.states[n]);
  const double terminal = weights.alpha2 != 0.0 ? misfit(traj.states.back()) : 0.0;
  double penalty = 0.0;
  if (weights.beta != 0.0) {
    for (std::size_t k = 0; k < chi.size(); ++k)
      if (chi[k] == 1.0) penalty += std::pow(lambda0.lambda[k], -weights.r);
    penalty *= cell;
  }
  return 0.5 * weights.alpha1 * tracking + 0.5 * weights.alpha2 * terminal + weights.beta / weights.r * penalty;
}

Field reduced_gradient(const Trajectory& traj, const Trajectory& adj, const FidelityField& lambda0, const Field& f,
                       const CostWeights& weights) {
  if (adj.states.size() != traj.states.size())
    throw Error(ErrorCode::TrajectoryMismatch, "adjoint and state trajectories differ in length");
  const Field chi = lambda0.undamaged();
  Field g(traj.grid);
  for (int n = 1; n <= traj.n_steps(); ++n) {
    const Field& p = adj.states[n];
    const Field& phi = traj.states[n];
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += traj.dt * p[k] * (f[k] - phi[k]);
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (chi[k] == 0.0) {
      g[k] = 0.0;
      continue;
    }
    if (weights.beta != 0.0) g[k] -= weights.beta * std::pow(lambda0.lambda[k], -(weights.r + 1.0));
  }
  return g;
}

Field hessian_apply(const Trajectory& traj, const Trajectory& adj, const FidelityField& lambda0, const Field& f,
                    const CostWeights& weights, const Field& k0, const SolverConfig& cfg, const Potential& potential) {
  if (weights.alpha2 != 0.0) throw Error(ErrorCode::Alpha2NotZero, "Hessian paths require alpha2 = 0");
  const Field chi = lambda0.undamaged();
  const Field k = hadamard(k0, chi);
  const Trajectory xi = solve_linearized(traj, lambda0, k, f, cfg, potential);
  const Trajectory P = solve_linearized_adjoint(traj, adj, xi, lambda0, k, weights, cfg, potential);
  Field out(traj.grid);
  for (int n = 1; n <= traj.n_steps(); ++n) {
    const Field& phi = traj.states[n];
    const Field& p = adj.states[n];
    const Field& x = xi.states[n];
    const Field& Pn = P.states[n];
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += traj.dt * (Pn[c] * (f[c] - phi[c]) - p[c] * x[c]);
  }
  for (std::size_t c = 0; c < out.size(); ++c) {
    if (chi[c] == 0.0) {
      out[c] = 0.0;
      continue;
    }
    if (weights.beta != 0.0)
      out[c] += weights.beta * (weights.r + 1.0) * std::pow(lambda0.lambda[c], -(weights.r + 2.0)) * k[c];
  }
  return out;
}

double evaluate_cost(const ControlProblem& problem, const Field& lambda0) {
  const FidelityField fid = problem.fidelity(lambda0);
  const Potential potential(problem.potential);
  const Trajectory traj = solve(problem.phi0, fid, problem.f, problem.cfg, potential);
  return cost(traj, fid, problem.f, problem.weights);
}

Evaluation evaluate(const ControlProblem& problem, const Field& lambda0) {
  const Potential potential(problem.potential);
  Evaluation e{problem.fidelity(lambda0), {}, {}, 0.0, {}};
  e.state = solve(problem.phi0, e.fidelity, problem.f, problem.cfg, potential);
  e.J = cost(e.state, e.fidelity, problem.f, problem.weights);
  e.adjoint = solve_adjoint(e.state, e.fidelity, problem.f, problem.weights, problem.cfg, potential);
  e.gradient = reduced_gradient(e.state, e.adjoint, e.fidelity, problem.f, problem.weights);
  return e;
}

Field hessian_apply(const ControlProblem& problem, const Evaluation& at, const Field& k0) {
  const Potential potential(problem.potential);
  return hessian_apply(at.state, at.adjoint, at.fidelity, problem.f, problem.weights, k0, problem.cfg, potential);
}

double hessian_form(const ControlProblem& problem, const Evaluation& at, const Field& h0, const Field& k0) {
  return l2_inner(hessian_apply(problem, at, k0), hadamard(h0, at.fidelity.undamaged()));
}

Field project_box(const Field& lambda0, const ControlBox& box) {
  require_same_grid(lambda0.grid(), box.mask_D.grid(), "project_box");
  Field out(lambda0.grid());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = box.mask_D[k] == 1.0 ? 0.0 : std::clamp(lambda0[k], box.lambda_min, box.lambda_max);
  return out;
}

double stationarity(const Field& lambda0, const Field& g, const ControlBox& box, double s0) {
  if (!(s0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "stationarity step must be positive");
  Field trial = lambda0;
  trial.axpy(-s0, g);
  Field diff = project_box(lambda0, box) - project_box(trial, box);
  return l2_norm(diff) / s0;
}

std::size_t ActiveSet::count_active() const {
  std::size_t n = 0;
  for (double v : strongly_active.values()) n += v == 1.0;
  return n;
}

bool ActiveSet::in_cone(const Field& h) const {
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (undamaged[k] == 0.0) continue;
    if (strongly_active[k] == 1.0) {
      if (h[k] != 0.0) return false;
    } else if (at_lower[k] == 1.0 && h[k] < 0.0) {
      return false;
    } else if (at_upper[k] == 1.0 && h[k] > 0.0) {
      return false;
    }
  }
  return true;
}

Field ActiveSet::project_to_cone(const Field& h) const {
  Field out(h.grid());
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (undamaged[k] == 0.0 || strongly_active[k] == 1.0) continue;
    double v = h[k];
    if (at_lower[k] == 1.0) v = std::max(v, 0.0);
    if (at_upper[k] == 1.0) v = std::min(v, 0.0);
    out[k] = v;
  }
  return out;
}

ActiveSet active_set_and_cone(const Field& lambda0, const Field& g, const ControlBox& box, double tol_active) {
  require_same_grid(lambda0.grid(), g.grid(), "active_set_and_cone");
  ActiveSet s{Field(g.grid()), Field(g.grid()), Field(g.grid()), Field(g.grid()), 0.0};
  double gmax = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (box.mask_D[k] == 0.0) gmax = std::max(gmax, std::abs(g[k]));
  s.tol = tol_active >= 0.0 ? tol_active : 1e-8 * gmax;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (box.mask_D[k] == 1.0) continue;
    s.undamaged[k] = 1.0;
    if (std::abs(g[k]) > s.tol) s.strongly_active[k] = 1.0;
    if (lambda0[k] == box.lambda_min) s.at_lower[k] = 1.0;
    if (lambda0[k] == box.lambda_max) s.at_upper[k] = 1.0;
  }
  return s;
}

namespace {

void control_range(const Field& lambda0, const Field& mask_D, double& lo, double& hi) {
  lo = INFINITY;
  hi = -INFINITY;
  for (std::size_t k = 0; k < lambda0.size(); ++k) {
    if (mask_D[k] == 1.0) continue;
    lo = std::min(lo, lambda0[k]);
    hi = std::max(hi, lambda0[k]);
  }
}

OptimIteration record(int iter, double J, double stat, double step, int backtracks, const Field& lambda0,
                      const Field& mask_D) {
  OptimIteration it{iter, J, stat, step, backtracks, 0.0, 0.0};
  control_range(lambda0, mask_D, it.min_lambda, it.max_lambda);
  return it;
}

}  // namespace

OptimResult optimize(const ControlProblem& problem, const Field& lambda_init, const OptimizerConfig& opt) {
  problem.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const ControlBox& box = problem.box;
  const Potential potential(problem.potential);

  OptimResult res;
  res.lambda0 = project_box(lambda_init, box);
  res.final_eval = evaluate(problem, res.lambda0);
  double stat = stationarity(res.lambda0, res.final_eval.gradient, box, opt.s0);
  res.report.history.push_back(record(0, res.final_eval.J, stat, 0.0, 0, res.lambda0, box.mask_D));

  double step = opt.initial_step;
  if (!(step > 0.0)) {
    const double gmax = res.final_eval.gradient.max_abs();
    step = gmax > 0.0 ? 0.1 * (box.lambda_max - box.lambda_min) / gmax : 1.0;
  }

  int iter = 0;
  while (stat > opt.tol && iter < opt.max_iter) {
    const Evaluation& cur = res.final_eval;
    int backtracks = 0;
    bool accepted = false;
    Field trial;
    Trajectory trial_state;
    FidelityField trial_fid;
    double trial_J = 0.0;
    for (; backtracks <= opt.max_backtracks; ++backtracks) {
      Field moved = res.lambda0;
      moved.axpy(-step, cur.gradient);
      trial = project_box(moved, box);
      const double decrease = l2_inner(cur.gradient, trial - res.lambda0);
      trial_fid = problem.fidelity(trial);
      trial_state = solve(problem.phi0, trial_fid, problem.f, problem.cfg, potential);
      trial_J = cost(trial_state, trial_fid, problem.f, problem.weights);
      if (trial_J <= cur.J + opt.armijo_c * decrease) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted)
      throw Error(ErrorCode::LineSearchFailed,
                  "no sufficient decrease after " + std::to_string(opt.max_backtracks) + " halvings at iteration " +
                      std::to_string(iter + 1));
    ++iter;
    Evaluation next{trial_fid, std::move(trial_state), {}, trial_J, {}};
    next.adjoint = solve_adjoint(next.state, next.fidelity, problem.f, problem.weights, problem.cfg, potential);
    next.gradient = reduced_gradient(next.state, next.adjoint, next.fidelity, problem.f, problem.weights);
    res.lambda0 = std::move(trial);
    res.final_eval = std::move(next);
    stat = stationarity(res.lambda0, res.final_eval.gradient, box, opt.s0);
    res.report.history.push_back(record(iter, res.final_eval.J, stat, step, backtracks, res.lambda0, box.mask_D));
    if (backtracks == 0) step *= 2.0;
  }

  res.report.iterations = iter;
  res.report.converged = stat <= opt.tol;
  const ActiveSet as = active_set_and_cone(res.lambda0, res.final_eval.gradient, box);
  res.report.active_cells = as.count_active();
  for (std::size_t k = 0; k < as.at_lower.size(); ++k) {
    res.report.lower_cells += as.at_lower[k] == 1.0;
    res.report.upper_cells += as.at_upper[k] == 1.0;
  }
  res.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

OptimResult optimize(const ControlProblem& problem, const OptimizerConfig& opt) {
  Field init(problem.phi0.grid(), 0.5 * (problem.box.lambda_min + problem.box.lambda_max));
  return optimize(problem, init, opt);
}

std::vector<Field> random_directions(const ControlProblem& problem, const Field& scale, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<Field> out;
  for (int d = 0; d < count; ++d) {
    Field h(problem.phi0.grid());
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double u = uni(rng);
      if (problem.box.mask_D[k] == 0.0) h[k] = u * scale[k];
    }
    out.push_back(std::move(h));
  }
  return out;
}

Field perturbed_control(const ControlProblem& problem, double center, double spread, std::uint64_t seed) {
  if (!(center > 0.0)) throw Error(ErrorCode::InvalidArgument, "control center must be positive");
  const Field u = random_directions(problem, Field(problem.phi0.grid(), 1.0), 1, seed)[0];
  Field l0(u.grid());
  for (std::size_t k = 0; k < l0.size(); ++k) l0[k] = center * std::pow(10.0, spread * u[k]);
  return project_box(l0, problem.box);
}

namespace {

DirectionalCheck compare(double analytic, double fd) {
  return {analytic, fd, fd != 0.0 ? std::abs(analytic - fd) / std::abs(fd) : std::abs(analytic)};
}

Field shifted(const Field& lambda0, double tau, const Field& h) {
  Field out = lambda0;
  out.axpy(tau, h);
  return out;
}

}  // namespace

std::vector<DirectionalCheck> gradient_fd_check(const ControlProblem& problem, const Field& lambda0,
                                                const std::vector<Field>& directions, double tau) {
  const Evaluation at = evaluate(problem, lambda0);
  std::vector<DirectionalCheck> out;
  for (const Field& h : directions) {
    const double jp = evaluate_cost(problem, shifted(lambda0, tau, h));
    const double jm = evaluate_cost(problem, shifted(lambda0, -tau, h));
    out.push_back(compare(l2_inner(at.gradient, h), (jp - jm) / (2.0 * tau)));
  }
  return out;
}

std::vector<DirectionalCheck> hessian_fd_check(const ControlProblem& problem, const Field& lambda0,
                                               const std::vector<Field>& directions, double tau) {
  const Evaluation at = evaluate(problem, lambda0);
  std::vector<DirectionalCheck> out;
  for (const Field& h : directions) {
    const double jp = evaluate_cost(problem, shifted(lambda0, tau, h));
    const double jm = evaluate_cost(problem, shifted(lambda0, -tau, h));
    out.push_back(compare(hessian_form(problem, at, h, h), (jp - 2.0 * at.J + jm) / (tau * tau)));
  }
  return out;
}

double hessian_symmetry_defect(const ControlProblem& problem, const Evaluation& at, const Field& h, const Field& k) {
  const Field Hh = hessian_apply(problem, at, h);
  const Field Hk = hessian_apply(problem, at, k);
  const double hk = l2_inner(Hk, h), kh = l2_inner(Hh, k);
  return std::abs(hk - kh) / (std::abs(l2_inner(Hh, h)) + std::abs(l2_inner(Hk, k)) + 1.0);
}

SecondOrderReport second_order_check(const ControlProblem& problem, const Evaluation& at, int n_dirs,
                                     std::uint64_t seed, double tol_active) {
  if (problem.weights.alpha2 != 0.0) throw Error(ErrorCode::Alpha2NotZero, "second-order check requires alpha2 = 0");
  const ActiveSet as = active_set_and_cone(at.fidelity.lambda, at.gradient, problem.box, tol_active);
  SecondOrderReport rep;
  rep.requested = n_dirs;
  rep.active_cells = as.count_active();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const Grid& grid = at.fidelity.lambda.grid();
  for (int d = 0; d < n_dirs; ++d) {
    Field h(grid);
    for (double& v : h.values()) v = uni(rng);
    h = as.project_to_cone(h);
    const double nrm = l2_norm(h);
    if (nrm == 0.0) {
      ++rep.skipped;
      continue;
    }
    h *= 1.0 / nrm;
    const double c = hessian_form(problem, at, h, h);
    rep.curvatures.push_back(c);
    ++rep.used;
  }
  if (!rep.curvatures.empty()) rep.min_curvature = *std::min_element(rep.curvatures.begin(), rep.curvatures.end());
  return rep;
}

}  // namespace chinpaint
