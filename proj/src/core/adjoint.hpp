#pragma once

#include <optional>
#include <vector>

#include "core/forward.hpp"

namespace chinpaint {

// Weights of the tracking cost
//   J = (a1/2) int_0^T int_{Omega\D} |phi - f|^2 + (a2/2) int_{Omega\D} |phi(T) - f|^2
//       + (beta/r) int_{Omega\D} lambda0^{-r}.
struct CostWeights {
  double alpha1 = 1.0;
  double alpha2 = 0.0;
  double beta = 1e-3;
  double r = 2.0;

  void validate() const;
};

// Trapezoid weight of time node n on 0..N.
double trapezoid_weight(int n, int n_steps);

// g3 indexed by time node 0..N (empty = zero); g4 is the final datum.
struct AdjointSources {
  std::vector<Field> g3;
  std::optional<Field> g4;
};

// Transpose of the linearised recursion, marched backward:
//   K p^N = dt w_N g3^N + g4,   K p^n = B_n^T p^{n+1} + dt w_n g3^n,
// so that for any xi from solve_linear_general
//   sum_n dt w_n <g3^n, xi^n> + <g4, xi^N> = sum_{n>=1} dt <p^n, g1^n + L g2^{n-1}>.
Trajectory solve_backward_general(const Trajectory& traj_bar, const FidelityField& lambda_bar,
                                  const AdjointSources& sources, const SolverConfig& cfg, const Potential& potential);

// Cost adjoint: g3 = a1 chi (phi_bar - f), g4 = a2 chi (phi_bar^N - f).
Trajectory solve_adjoint(const Trajectory& traj_bar, const FidelityField& lambda_bar, const Field& f,
                         const CostWeights& weights, const SolverConfig& cfg, const Potential& potential);

// q = -eps Lap p
Field adjoint_q(const Field& p, const Potential& potential);

// Derivative of the cost adjoint in direction h (requires alpha2 == 0):
// backward solve with sources a1 chi xi - h p_bar + F'''(phi_bar) xi (L p_bar)/eps,
// the latter two placed at the time nodes where the discrete transpose puts them.
Trajectory solve_linearized_adjoint(const Trajectory& traj_bar, const Trajectory& adj_bar, const Trajectory& xi,
                                    const FidelityField& lambda_bar, const Field& h, const CostWeights& weights,
                                    const SolverConfig& cfg, const Potential& potential);

// max_n ||p1^n - p2^n||_{L2} / ||lambda1 - lambda2||_{L2}; 0 when the controls coincide.
double costate_lipschitz_ratio(const FidelityField& lambda1, const FidelityField& lambda2, const Field& phi0,
                               const Field& f, const CostWeights& weights, const SolverConfig& cfg,
                               const Potential& potential);

}  // namespace chinpaint
