#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/adjoint.hpp"
#include "core/forward.hpp"

namespace chinpaint {

struct ControlBox {
  double lambda_min = 1.0;
  double lambda_max = 1e4;
  Field mask_D;

  void validate() const;
};

// Everything needed to evaluate the reduced cost J(S(lambda0), lambda0).
struct ControlProblem {
  Field phi0;
  Field f;
  ControlBox box;
  CostWeights weights;
  SolverConfig cfg;
  PotentialParams potential;

  void validate() const;
  FidelityField fidelity(const Field& lambda0) const;
};

// (a1/2) sum_n w_n dt |chi (phi^n - f)|^2 + (a2/2) |chi (phi^N - f)|^2
//   + (beta/r) sum_{Omega\D} lambda0^{-r} hx hy, w_n trapezoid weights.
double cost(const Trajectory& traj, const FidelityField& lambda0, const Field& f, const CostWeights& weights);

// Riesz density of DJ in L2(Omega\D):
//   g = sum_{n>=1} dt p^n (f - phi^n) - beta lambda0^{-(r+1)} on Omega\D, 0 on D.
// The trapezoid weights of the tracking term already sit in the adjoint
// sources, so the time sum here is unweighted. g is the integrand of the
// variational inequality; -g is the descent direction.
Field reduced_gradient(const Trajectory& traj, const Trajectory& adj, const FidelityField& lambda0, const Field& f,
                       const CostWeights& weights);

// Riesz density of D^2J[., k0]:
//   sum dt P^n (f - phi^n) - sum dt p^n xi^n + beta (r+1) lambda0^{-(r+2)} k0
// with xi = DS[k0] and P the linearised adjoint. Requires alpha2 = 0.
Field hessian_apply(const Trajectory& traj, const Trajectory& adj, const FidelityField& lambda0, const Field& f,
                    const CostWeights& weights, const Field& k0, const SolverConfig& cfg, const Potential& potential);

// A forward/adjoint evaluation at one control.
struct Evaluation {
  FidelityField fidelity;
  Trajectory state;
  Trajectory adjoint;
  double J = 0.0;
  Field gradient;
};

double evaluate_cost(const ControlProblem& problem, const Field& lambda0);
Evaluation evaluate(const ControlProblem& problem, const Field& lambda0);
Field hessian_apply(const ControlProblem& problem, const Evaluation& at, const Field& k0);
// <hessian_apply(k0), h0>
double hessian_form(const ControlProblem& problem, const Evaluation& at, const Field& h0, const Field& k0);

// Pointwise clamp to [lambda_min, lambda_max] off D, zero on D.
Field project_box(const Field& lambda0, const ControlBox& box);

// ||lambda0 - P(lambda0 - s0 g)||_{L2} / s0; zero exactly when the discrete
// variational inequality holds.
double stationarity(const Field& lambda0, const Field& g, const ControlBox& box, double s0 = 1.0);

struct ActiveSet {
  Field strongly_active;  // A0: |g| > tol off D
  Field at_lower;         // lambda0 == lambda_min off D
  Field at_upper;         // lambda0 == lambda_max off D
  Field undamaged;        // chi_{Omega\D}
  double tol = 0.0;

  std::size_t count_active() const;
  // Sign conditions of the critical cone.
  bool in_cone(const Field& h) const;
  // Zero on A0 and on D, sign-corrected at active bounds.
  Field project_to_cone(const Field& h) const;
};

// tol_active < 0 selects 1e-8 * ||g||_inf.
ActiveSet active_set_and_cone(const Field& lambda0, const Field& g, const ControlBox& box, double tol_active = -1.0);

struct OptimizerConfig {
  int max_iter = 200;
  double tol = 1e-6;            // on stationarity(., ., ., s0)
  double s0 = 1.0;
  double initial_step = -1.0;   // < 0: 0.1 (lambda_max - lambda_min) / ||g||_inf
  double armijo_c = 1e-4;
  int max_backtracks = 40;
};

struct OptimIteration {
  int iter = 0;
  double J = 0.0;
  double stationarity = 0.0;
  double step_size = 0.0;
  int armijo_backtracks = 0;
  double min_lambda = 0.0;
  double max_lambda = 0.0;
};

struct OptimReport {
  int iterations = 0;
  bool converged = false;
  std::vector<OptimIteration> history;  // accepted iterates, starting with the initial control
  std::size_t active_cells = 0;
  std::size_t lower_cells = 0;
  std::size_t upper_cells = 0;
  double wall_seconds = 0.0;
};

struct OptimResult {
  Field lambda0;
  Evaluation final_eval;
  OptimReport report;
};

// Projected gradient with Armijo backtracking (halving). Throws
// LineSearchFailed if max_backtracks halvings do not give sufficient decrease.
OptimResult optimize(const ControlProblem& problem, const Field& lambda_init, const OptimizerConfig& opt);
// Starts from the constant control (lambda_min + lambda_max)/2.
OptimResult optimize(const ControlProblem& problem, const OptimizerConfig& opt);

struct SecondOrderReport {
  int requested = 0;
  int used = 0;
  int skipped = 0;  // directions that vanished after projection onto the cone
  std::vector<double> curvatures;
  double min_curvature = 0.0;  // over used directions; 0 if none
  std::size_t active_cells = 0;
};

// Random directions uniform in [-1, 1] off D, multiplied pointwise by `scale`.
std::vector<Field> random_directions(const ControlProblem& problem, const Field& scale, int count, std::uint64_t seed);

// center * 10^(spread u) off D with u uniform in [-1, 1], projected onto the box.
Field perturbed_control(const ControlProblem& problem, double center, double spread, std::uint64_t seed);

struct DirectionalCheck {
  double analytic = 0.0;
  double finite_difference = 0.0;
  double rel_error = 0.0;  // |analytic - fd| / |fd|
};

// <g, h> against (J(l + tau h) - J(l - tau h)) / (2 tau).
std::vector<DirectionalCheck> gradient_fd_check(const ControlProblem& problem, const Field& lambda0,
                                                const std::vector<Field>& directions, double tau);
// D2J[h, h] against (J(l + tau h) - 2 J(l) + J(l - tau h)) / tau^2.
std::vector<DirectionalCheck> hessian_fd_check(const ControlProblem& problem, const Field& lambda0,
                                               const std::vector<Field>& directions, double tau);
// |D2J[h, k] - D2J[k, h]| / (|D2J[h, h]| + |D2J[k, k]| + 1)
double hessian_symmetry_defect(const ControlProblem& problem, const Evaluation& at, const Field& h, const Field& k);

SecondOrderReport second_order_check(const ControlProblem& problem, const Evaluation& at, int n_dirs,
                                     std::uint64_t seed, double tol_active = -1.0);

}  // namespace chinpaint
