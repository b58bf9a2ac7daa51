#include "capi/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/error.hpp"
#include "core/fixture.hpp"
#include "core/image.hpp"
#include "core/io.hpp"
#include "core/spectral.hpp"

namespace chinpaint::app {

namespace fs = std::filesystem;

namespace {

std::string prepare(const std::string& out_dir, const std::string& name) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory '" + out_dir + "': " + ec.message());
  return (fs::path(out_dir) / name).string();
}

std::ofstream open_text(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  return out;
}

double default_lambda0(const RunConfig& cfg) {
  return cfg.lambda0 > 0.0 ? cfg.lambda0 : 0.5 * (cfg.lambda_min + cfg.lambda_max);
}

Field constant_control(const ControlProblem& cp, double value) {
  return project_box(Field(cp.phi0.grid(), value), cp.box);
}

void write_checks(const std::vector<DirectionalCheck>& checks, const std::string& path) {
  std::ofstream out = open_text(path);
  out << "direction,analytic,finite_difference,rel_error\n";
  for (std::size_t d = 0; d < checks.size(); ++d)
    out << d << ',' << csv_number(checks[d].analytic) << ',' << csv_number(checks[d].finite_difference) << ','
        << csv_number(checks[d].rel_error) << '\n';
}

}  // namespace

Problem stripes_problem(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.nx != cfg.ny || cfg.lx != cfg.ly)
    throw Error(ErrorCode::Config, "the built-in stripe image needs a square grid (nx = ny, lx = ly)");
  StripeSpec spec;
  spec.n = cfg.nx;
  spec.length = cfg.lx;
  spec.period = cfg.stripe_period;
  spec.hole = cfg.stripe_hole;
  spec.blur_sigma = cfg.blur_sigma;
  StripeImage img = make_stripes(spec, cfg.potential);
  Problem p;
  p.grid = img.grid;
  p.f = std::move(img.f);
  p.mask_D = std::move(img.mask_D);
  p.phi0 = std::move(img.phi0);
  p.truth = std::move(img.truth);
  p.m_star = img.m_star;
  return p;
}

Problem image_problem(const RunConfig& cfg, const std::string& image_path, const std::string& mask_path) {
  cfg.validate();
  Problem p;
  p.grid = cfg.grid();
  const Field gray = load_image(image_path, p.grid);
  p.mask_D = load_mask(mask_path, p.grid);
  p.m_star = well_location(cfg.potential);
  p.f = binarize_to_phase(gray, p.m_star, cfg.binarize_threshold, &p.mask_D);
  p.phi0 = initial_guess(p.f, p.mask_D, cfg.blur_sigma);
  return p;
}

ControlProblem control_problem(const RunConfig& cfg, const Problem& p) {
  ControlProblem cp;
  cp.phi0 = p.phi0;
  cp.f = p.f;
  cp.box.lambda_min = cfg.lambda_min;
  cp.box.lambda_max = cfg.lambda_max;
  cp.box.mask_D = p.mask_D;
  cp.weights = cfg.weights;
  cp.cfg = cfg.solver;
  cp.potential = cfg.potential;
  cp.validate();
  return cp;
}

double match_fraction(const Field& phi, const Field& truth, const Field& mask_D) {
  std::size_t total = 0, hits = 0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (mask_D[k] != 1.0) continue;
    ++total;
    if ((phi[k] >= 0.0) == (truth[k] >= 0.0)) ++hits;
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 1.0;
}

double misfit_undamaged(const Field& phi, const Field& f, const Field& mask_D) {
  double s = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k)
    if (mask_D[k] != 1.0) s += (phi[k] - f[k]) * (phi[k] - f[k]);
  return std::sqrt(s * phi.grid().cell_area());
}

InpaintResult run_inpaint(const RunConfig& cfg, const Problem& p, const std::string& out_dir) {
  const ControlProblem cp = control_problem(cfg, p);
  InpaintResult res;
  res.lambda0 = default_lambda0(cfg);
  const FidelityField fid = cp.fidelity(constant_control(cp, res.lambda0));
  Potential potential(cp.potential);
  const Trajectory traj = solve(cp.phi0, fid, cp.f, cp.cfg, potential);
  const Field& last = traj.states.back();

  res.final_time = cp.cfg.final_time();
  res.cost = cost(traj, fid, cp.f, cp.weights);
  res.misfit = misfit_undamaged(last, cp.f, cp.box.mask_D);
  if (p.truth) res.match = match_fraction(last, *p.truth, p.mask_D);
  for (const Field& s : traj.states) res.max_abs_phi = std::max(res.max_abs_phi, s.max_abs());
  res.mass_balance = mass_balance_residual(traj, fid, cp.f);
  res.energy_initial = traj.diagnostics.front().energy;
  res.energy_final = traj.diagnostics.back().energy;
  res.clamp_events = potential.clamp_events();

  if (!out_dir.empty()) {
    write_phase_image(last, p.m_star, prepare(out_dir, "phi_final.pgm"));
    write_trajectory(traj, prepare(out_dir, "trajectory.bin"));
    write_diagnostics_csv(traj, prepare(out_dir, "diagnostics.csv"));
  }
  return res;
}

OptimizeResult run_optimize(const RunConfig& cfg, const Problem& p, const std::string& out_dir) {
  const ControlProblem cp = control_problem(cfg, p);
  OptimizeResult res;
  res.optim = optimize(cp, cfg.optimizer);
  const auto& hist = res.optim.report.history;
  res.cost_initial = hist.front().J;
  for (std::size_t i = 1; i < hist.size(); ++i)
    if (hist[i].J > hist[i - 1].J) res.monotone = false;
  const Field& last = res.optim.final_eval.state.states.back();
  res.misfit = misfit_undamaged(last, cp.f, cp.box.mask_D);
  if (p.truth) res.match = match_fraction(last, *p.truth, p.mask_D);
  if (cp.weights.alpha2 == 0.0 && cfg.second_order_dirs > 0)
    res.second_order = second_order_check(cp, res.optim.final_eval, cfg.second_order_dirs, cfg.seed);

  if (!out_dir.empty()) {
    write_optim_csv(res.optim.report, prepare(out_dir, "optim.csv"));
    write_field(res.optim.lambda0, prepare(out_dir, "lambda_opt.bin"));
    write_phase_image(last, p.m_star, prepare(out_dir, "phi_opt.pgm"));
    if (res.second_order) {
      std::ofstream out = open_text(prepare(out_dir, "second_order.csv"));
      out << "direction,curvature\n";
      for (std::size_t d = 0; d < res.second_order->curvatures.size(); ++d)
        out << d << ',' << csv_number(res.second_order->curvatures[d]) << '\n';
    }
  }
  return res;
}

Field check_point(const RunConfig& cfg, const ControlProblem& cp) {
  const double center = cfg.lambda0 > 0.0 ? cfg.lambda0 : std::sqrt(cfg.lambda_min * cfg.lambda_max);
  return perturbed_control(cp, center, 0.5, cfg.seed);
}

CheckResult run_grad_check(const RunConfig& cfg, const Problem& p, const std::string& out_dir) {
  const ControlProblem cp = control_problem(cfg, p);
  const Field l0 = check_point(cfg, cp);
  const auto dirs = random_directions(cp, cfg.check_amplitude * l0, cfg.check_directions, cfg.seed + 1);
  CheckResult res;
  res.checks = gradient_fd_check(cp, l0, dirs, cfg.grad_tau);
  for (const auto& c : res.checks) res.max_rel_error = std::max(res.max_rel_error, c.rel_error);
  if (!out_dir.empty()) write_checks(res.checks, prepare(out_dir, "grad_check.csv"));
  return res;
}

CheckResult run_hess_check(const RunConfig& cfg, const Problem& p, const std::string& out_dir) {
  const ControlProblem cp = control_problem(cfg, p);
  if (cp.weights.alpha2 != 0.0)
    throw Error(ErrorCode::Alpha2NotZero, "hess-check requires alpha2 = 0");
  const Field l0 = check_point(cfg, cp);
  const auto dirs = random_directions(cp, cfg.check_amplitude * l0, cfg.check_directions, cfg.seed + 1);
  CheckResult res;
  res.checks = hessian_fd_check(cp, l0, dirs, cfg.hess_tau);
  res.min_curvature = res.checks.empty() ? 0.0 : res.checks.front().analytic;
  for (const auto& c : res.checks) {
    res.max_rel_error = std::max(res.max_rel_error, c.rel_error);
    res.min_curvature = std::min(res.min_curvature, c.analytic);
  }
  if (dirs.size() >= 2) res.symmetry_defect = hessian_symmetry_defect(cp, evaluate(cp, l0), dirs[0], dirs[1]);
  if (!out_dir.empty()) write_checks(res.checks, prepare(out_dir, "hess_check.csv"));
  return res;
}

DecayResult run_decay_experiment(const RunConfig& cfg, const Problem& p, const std::string& out_dir) {
  cfg.validate();
  SolverConfig target_cfg = cfg.solver;
  target_cfg.dt = cfg.target_dt;
  target_cfg.n_steps = 1;
  TargetConfig tcfg;
  tcfg.lambda_big = cfg.target_lambda_big;
  tcfg.stat_tol = cfg.target_stat_tol;
  tcfg.max_steps = cfg.target_max_steps;
  tcfg.relax = cfg.target_relax;

  DecayConfig dcfg;
  dcfg.cfg = cfg.solver;
  dcfg.cfg.dt = cfg.decay_dt;
  dcfg.cfg.n_steps = cfg.decay_steps;
  dcfg.horizon = cfg.decay_horizon;
  dcfg.floor = cfg.decay_floor;

  DecayResult res;
  res.target = regularized_target(p.f, p.mask_D, cfg.potential, target_cfg, tcfg);
  res.reports = decay_experiment(res.target.f_tilde, p.phi0, p.mask_D, cfg.decay_lambdas, cfg.potential, dcfg);
  if (!cfg.scan_eps.empty())
    res.scan = epsilon_threshold_scan(cfg.scan_eps, cfg.scan_lambda0, p.f, p.phi0, p.mask_D, cfg.potential, dcfg,
                                      target_cfg, tcfg);

  if (!out_dir.empty()) {
    for (const auto& r : res.reports) {
      char name[64];
      std::snprintf(name, sizeof name, "decay_%g.csv", r.lambda0);
      write_decay_csv(r, prepare(out_dir, name));
    }
    write_decay_summary_csv(res.reports, prepare(out_dir, "decay_summary.csv"));
    write_epsilon_scan_csv(res.scan, prepare(out_dir, "eps_scan.csv"));
    std::ofstream out = open_text(prepare(out_dir, "decay_report.txt"));
    out << "whole-domain analogue of the subdomain decay estimate; surrogate-norm d(t) = "
           "||chi_{Omega\\D}(phi - f_tilde)||_{H^-1(Omega)}\n";
    out << "target: steps " << res.target.steps << ", stationarity " << csv_number(res.target.stationarity)
        << ", euler-lagrange residual " << csv_number(res.target.euler_lagrange_residual) << '\n';
    for (const auto& r : res.reports)
      out << "lambda0 " << csv_number(r.lambda0) << ": rate " << csv_number(r.fitted_rate) << ", r2 "
          << csv_number(r.fit_r2) << ", lambda0*eps^3 " << csv_number(r.threshold_context) << '\n';
    for (const auto& row : res.scan)
      out << "eps " << csv_number(row.eps) << " at lambda0 " << csv_number(cfg.scan_lambda0) << ": rate "
          << csv_number(row.fitted_rate) << ", r2 " << csv_number(row.fit_r2) << '\n';
  }
  return res;
}

void export_diagnostics(const RunConfig& cfg, const Problem& p, const std::string& out_dir) {
  if (out_dir.empty()) throw Error(ErrorCode::InvalidArgument, "export-diagnostics needs an output directory");
  const ControlProblem cp = control_problem(cfg, p);
  const FidelityField fid = cp.fidelity(constant_control(cp, default_lambda0(cfg)));
  Potential potential(cp.potential);
  const Trajectory traj = solve(cp.phi0, fid, cp.f, cp.cfg, potential);
  write_trajectory(traj, prepare(out_dir, "trajectory.bin"));
  write_diagnostics_csv(traj, prepare(out_dir, "diagnostics.csv"));
}

}  // namespace chinpaint::app
