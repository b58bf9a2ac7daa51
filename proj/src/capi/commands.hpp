#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/control.hpp"
#include "core/experiments.hpp"

namespace chinpaint::app {

// Image data of one run: f is +-m* off D and 0 on D.
struct Problem {
  Grid grid{};
  Field f;
  Field mask_D;
  Field phi0;
  std::optional<Field> truth;
  double m_star = 0.0;
};

// Stripes sized by the config grid (square grids only).
Problem stripes_problem(const RunConfig& cfg);
Problem image_problem(const RunConfig& cfg, const std::string& image_path, const std::string& mask_path);

ControlProblem control_problem(const RunConfig& cfg, const Problem& p);

// Fraction of D cells where phi and truth have the same sign.
double match_fraction(const Field& phi, const Field& truth, const Field& mask_D);
// ||phi - f||_{L2(Omega\D)}
double misfit_undamaged(const Field& phi, const Field& f, const Field& mask_D);

struct InpaintResult {
  double lambda0 = 0.0;
  double final_time = 0.0;
  double cost = 0.0;
  double misfit = 0.0;
  double match = -1.0;
  double max_abs_phi = 0.0;
  double mass_balance = 0.0;
  double energy_initial = 0.0;
  double energy_final = 0.0;
  std::uint64_t clamp_events = 0;
};

// An empty out_dir skips file output.
InpaintResult run_inpaint(const RunConfig& cfg, const Problem& p, const std::string& out_dir);

struct OptimizeResult {
  OptimResult optim;
  double cost_initial = 0.0;
  bool monotone = true;
  double misfit = 0.0;
  double match = -1.0;
  std::optional<SecondOrderReport> second_order;
};

OptimizeResult run_optimize(const RunConfig& cfg, const Problem& p, const std::string& out_dir);

struct CheckResult {
  std::vector<DirectionalCheck> checks;
  double max_rel_error = 0.0;
  double symmetry_defect = 0.0;
  double min_curvature = 0.0;
};

// Evaluation point: perturbed_control around lambda0 (or the geometric mean
// of the box) with half a decade of spread, seeded by `seed`.
Field check_point(const RunConfig& cfg, const ControlProblem& cp);
CheckResult run_grad_check(const RunConfig& cfg, const Problem& p, const std::string& out_dir);
CheckResult run_hess_check(const RunConfig& cfg, const Problem& p, const std::string& out_dir);

struct DecayResult {
  TargetResult target;
  std::vector<DecayReport> reports;
  std::vector<EpsilonScanRow> scan;
};

DecayResult run_decay_experiment(const RunConfig& cfg, const Problem& p, const std::string& out_dir);

void export_diagnostics(const RunConfig& cfg, const Problem& p, const std::string& out_dir);

}  // namespace chinpaint::app
