#pragma once

#include <functional>
#include <vector>

#include "core/forward.hpp"

namespace chinpaint {

// Sources of the general linearised system
//   xi_t - Lap eta = -lambda xi + g1,   eta = -eps Lap xi + F''(phi) xi / eps + g2,
// indexed by time node. g1[n+1] and g2[n] enter the step n -> n+1, matching
// where the forward scheme treats the fidelity source (implicit node) and the
// potential (explicit node). An empty vector stands for zero.
struct LinearizedSources {
  std::vector<Field> g1;
  std::vector<Field> g2;
};

// Throws TrajectoryMismatch unless traj was produced with cfg on `grid`.
void require_matching_trajectory(const Trajectory& traj, const SolverConfig& cfg, const char* where);

// Exact derivative of the discrete forward map: xi^0 = 0 and
//   K xi^{n+1} = B_n xi^n + dt g1^{n+1} + dt L g2^n,
// with B_n the linearisation of the explicit part at phi_bar^n.
Trajectory solve_linear_general(const Trajectory& traj_bar, const FidelityField& lambda_bar,
                                const LinearizedSources& sources, const SolverConfig& cfg,
                                const Potential& potential);

// Directional derivative DS(lambda_bar)[h]: g1^{n+1} = h (f - phi_bar^{n+1}), g2 = 0.
Trajectory solve_linearized(const Trajectory& traj_bar, const FidelityField& lambda_bar, const Field& h,
                            const Field& f, const SolverConfig& cfg, const Potential& potential);

// eta = -eps Lap xi + F''(phi_bar) xi / eps, rebuilt on demand.
Field linearized_potential(const Field& xi, const Field& phi_bar, const Potential& potential);

// max_n ||a^n - b^n||_{L2}
double max_l2_distance(const std::vector<Field>& a, const std::vector<Field>& b);
double max_l2_norm(const std::vector<Field>& a);

struct TaylorResult {
  std::vector<double> taus;
  std::vector<double> remainders;  // max_n ||S(l + tau h) - S(l) - tau xi||_{L2}
  double observed_order = 0.0;     // least-squares slope of log remainder vs log tau
  bool exact = false;              // every remainder is zero (slope undefined)
};

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Throws BoxViolation if lambda0 + tau h leaves the box for some tau.
TaylorResult taylor_remainder_order(const FidelityField& lambda0, const Field& h, const std::vector<double>& taus,
                                    const Field& phi0, const Field& f, const SolverConfig& cfg,
                                    const Potential& potential);

}  // namespace chinpaint
