#pragma once

#include <cstdint>
#include <vector>

#include "core/field.hpp"
#include "core/potential.hpp"
#include "core/scheme.hpp"

namespace chinpaint {

// lambda = lambda0 on Omega\D, 0 on D.
struct FidelityField {
  Field lambda;
  Field mask_D;  // chi_D
  double lambda_min = 0.0;
  double lambda_max = 0.0;

  // Builds lambda from a control lambda0 (only its values off D are read).
  // Throws BoxViolation if lambda0 leaves [lambda_min, lambda_max] off D.
  static FidelityField from_control(const Field& lambda0, const Field& mask_D, double lambda_min,
                                    double lambda_max);
  // Constant lambda0 on Omega\D.
  static FidelityField constant(double lambda0, const Field& mask_D);

  // chi_{Omega\D}
  Field undamaged() const;
  // lambda0 with zeros on D.
  const Field& control() const { return lambda; }
};

struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  double energy = 0.0;
  double mass = 0.0;  // mean of phi
  double min_phi = 0.0;
  double max_phi = 0.0;
  std::uint64_t clamp_events = 0;
  int picard_iterations = 0;
};

struct Trajectory {
  Grid grid{};
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<Field> states;  // phi^0 .. phi^N
  std::vector<Field> mus;     // mu^0 .. mu^N (forward runs only)
  std::vector<StepDiagnostics> diagnostics;

  int n_steps() const { return static_cast<int>(states.size()) - 1; }
  double time(int n) const { return t0 + n * dt; }
};

struct StepResult {
  Field phi;
  Field mu;
  int picard_iterations = 0;
  std::uint64_t clamp_events = 0;
};

// One linearly implicit stabilised step of
//   phi_t = Lap(-eps Lap phi + F'(phi)/eps) + lambda (f - phi).
StepResult step(const Field& phi_n, const FidelityField& fidelity, const Field& f, const SolverConfig& cfg,
                const Potential& potential);

// Same step with prebuilt operators (reused across a trajectory).
StepResult step(const StepOperators& ops, const Field& phi_n, const Field& lambda_f, const Potential& potential);

Trajectory solve(const Field& phi0, const FidelityField& fidelity, const Field& f, const SolverConfig& cfg,
                 const Potential& potential);

// Ginzburg-Landau energy (eps/2)|grad phi|^2 + (1/eps) int F(phi).
double energy(const Field& phi, const Potential& potential);

// mu = -eps Lap phi + F'(phi)/eps
Field chemical_potential(const Field& phi, const Potential& potential);

// max_n |(mean(phi^{n+1}) - mean(phi^n))/dt - mean(lambda (f - phi^{n+1}))|
double mass_balance_residual(const Trajectory& traj, const FidelityField& fidelity, const Field& f);

// max_n ||phi1^n - phi2^n||_{L2} / ||lambda1 - lambda2||_{L2}; 0 when the controls coincide.
double state_lipschitz_ratio(const FidelityField& lambda1, const FidelityField& lambda2, const Field& phi0,
                             const Field& f, const SolverConfig& cfg, const Potential& potential);

}  // namespace chinpaint
