#pragma once

#include <string>
#include <vector>

#include "core/control.hpp"
#include "core/experiments.hpp"
#include "core/forward.hpp"

namespace chinpaint {

// Little-endian header: int64 nx, int64 ny, f64 lx, f64 ly, f64 dt,
// int64 n_steps; then n_steps + 1 float64 frames in Field layout.
void write_trajectory(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory(const std::string& path);

// step,time,energy,mass,min_phi,max_phi,clamp_events
void write_diagnostics_csv(const Trajectory& traj, const std::string& path);
// iter,J,stationarity,step_size,armijo_backtracks,min_lambda,max_lambda
void write_optim_csv(const OptimReport& report, const std::string& path);
// time,d_hminus1
void write_decay_csv(const DecayReport& report, const std::string& path);
// lambda0,rate,r2
void write_decay_summary_csv(const std::vector<DecayReport>& reports, const std::string& path);
// eps,rate,r2,target_residual
void write_epsilon_scan_csv(const std::vector<EpsilonScanRow>& rows, const std::string& path);

// Raw float64 field dump with the trajectory header (n_steps = 0, dt = 0).
void write_field(const Field& f, const std::string& path);
Field read_field(const std::string& path);

// %.17g
std::string csv_number(double v);

}  // namespace chinpaint
