#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/control.hpp"
#include "core/experiments.hpp"

namespace chinpaint {

// Flat `key = value` configuration. Keys and defaults are listed in
// config.cpp (apply_key) and in the README.
struct RunConfig {
  int nx = 64;
  int ny = 64;
  double lx = 6.4;
  double ly = 6.4;

  PotentialParams potential{1.0, 1.5, 0.2};
  SolverConfig solver{5e-3, 200};
  CostWeights weights;
  double lambda_min = 1.0;
  double lambda_max = 1e4;
  double lambda0 = -1.0;  // constant control for `inpaint`; < 0 picks the box midpoint
  OptimizerConfig optimizer;

  double blur_sigma = 1.0;
  double binarize_threshold = 0.5;
  std::uint64_t seed = 1;

  // built-in stripe image used when no --image/--mask is given
  int stripe_period = 32;
  int stripe_hole = 16;

  // grad-check / hess-check
  int check_directions = 5;
  double grad_tau = 1e-4;
  double hess_tau = 1e-3;
  double check_amplitude = 0.1;  // directions scaled pointwise by amplitude * lambda0
  int second_order_dirs = 8;

  // decay-experiment
  std::vector<double> decay_lambdas{1.0, 10.0, 100.0, 1000.0};
  std::vector<double> scan_eps{1.0, 0.25};
  double scan_lambda0 = 100.0;
  double decay_dt = 0.05;
  int decay_steps = 400;
  double decay_horizon = 15.0;
  double decay_floor = 1e-9;
  double target_lambda_big = 200.0;
  double target_dt = 0.05;
  double target_stat_tol = 1e-3;
  int target_max_steps = 200000;
  bool target_relax = true;

  Grid grid() const;
  // Component invariants plus the cross-field rules; throws Config with a
  // message naming the offending keys.
  void validate() const;
};

// Throws Config on unknown keys or malformed values.
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);
// Value text as dump_config writes it; Config on unknown keys.
std::string get_key(const RunConfig& cfg, const std::string& key);
// Parses the file; Io if it cannot be read, Config on syntax errors.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
// "key=value"
void apply_override(RunConfig& cfg, const std::string& assignment);
// Serialises every key, one per line, in a form parse_config reads back.
std::string dump_config(const RunConfig& cfg);

}  // namespace chinpaint
