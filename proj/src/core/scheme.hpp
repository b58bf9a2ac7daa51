#pragma once

#include <vector>

#include "core/field.hpp"
#include "core/potential.hpp"

namespace chinpaint {

struct SolverConfig {
  double dt = 1e-4;
  int n_steps = 100;
  // Negative selects the default: half of max|F''| over the stabilisation range.
  double stabilization = -1.0;
  double picard_tol = 1e-10;
  int picard_max = 50;

  double final_time() const { return dt * n_steps; }
  void validate() const;
};

// Stabilisation constant used when SolverConfig::stabilization < 0:
// (1/2) max|F''| over |s| <= (1 + m*)/2, the midpoint between the pure phase
// and the singularity.
double default_stabilization(const Potential& potential);

struct LinearSolveStats {
  int iterations = 0;
  double correction = 0.0;  // size of the final fixed-point correction (L2)
};

// Operators of the linearly implicit stabilised step
//
//   K phi^{n+1} = phi^n + (dt/eps) L (F'(phi^n) - S phi^n) + dt lambda f,
//   K = I + dt eps L^2 - dt (S/eps) L + dt diag(lambda),
//
// where L is the spectral Neumann Laplacian. K is symmetric positive
// definite; it is inverted by the fixed-point iteration preconditioned with
// the diagonal spectral operator A + dt c I, 1 + dt c the geometric mean of
// 1 + dt min(lambda) and 1 + dt max(lambda), accelerated by
// conjugate gradients. The same operators serve the linearised and adjoint
// recursions, so those are exact derivatives/transposes of the forward map.
class StepOperators {
 public:
  StepOperators(const Grid& grid, const SolverConfig& cfg, const Potential& potential, const Field& lambda);

  const Grid& grid() const { return grid_; }
  double dt() const { return dt_; }
  double stabilization() const { return stab_; }
  const Field& lambda() const { return lambda_; }

  Field apply_K(const Field& x) const;

  // Solves K x = rhs. Throws PicardDiverged / NonFinite.
  Field solve_K(const Field& rhs, const Field* initial_guess, LinearSolveStats* stats = nullptr) const;

  // B x = x + (dt/eps) L ((F'' - S) x), with f2 = F''(phi^n) sampled on the grid.
  Field apply_B(const Field& x, const Field& f2) const;
  // B^T x = x + (dt/eps) (F'' - S) (L x).
  Field apply_BT(const Field& x, const Field& f2) const;

  // Explicit part of the forward right-hand side without the fidelity source:
  // phi + (dt/eps) L (F'(phi) - S phi).
  Field explicit_part(const Field& phi, const Field& f1) const;

 private:
  Field precondition(const Field& r) const;
  Field lap(const Field& x) const;
  Field balance_mean(const Field& rhs, Field x) const;

  Grid grid_;
  double dt_;
  double eps_;
  double stab_;
  double tol_;
  int max_iter_;
  Field lambda_;
  double shift_;
  std::vector<double> laplace_symbol_;   // -mu_kl
  std::vector<double> a_symbol_;         // 1 + dt eps mu^2 + dt (S/eps) mu
  std::vector<double> precond_symbol_;   // 1 / (a + dt c)
};

// F'(clamp(phi)) and F''(clamp(phi)) sampled pointwise.
Field sample_F1d(const Potential& potential, const Field& phi);
Field sample_F2d(const Potential& potential, const Field& phi);
Field sample_F3d(const Potential& potential, const Field& phi);

}  // namespace chinpaint
