// Command-line front end. Links only against the C interface.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chinpaint/chinpaint.h"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::string image;
  std::string mask;
  std::string out_dir;
  bool quiet = false;
};

int exit_code(chi_status st) { return st == CHI_ERR_NUMERICAL ? kExitNumerical : kExitValidation; }

int report(chi_status st) {
  std::fprintf(stderr, "error: %s\n", chi_last_error());
  return exit_code(st);
}

struct Session {
  chi_config* cfg = nullptr;
  chi_problem* problem = nullptr;
  ~Session() {
    chi_problem_free(problem);
    chi_config_free(cfg);
  }
};

chi_status load_config(const Options& o, Session& s) {
  chi_status st = o.config.empty() ? chi_config_new(&s.cfg) : chi_config_load(o.config.c_str(), &s.cfg);
  if (st != CHI_OK) return st;
  for (const auto& kv : o.sets)
    if ((st = chi_config_apply(s.cfg, kv.c_str())) != CHI_OK) return st;
  return chi_config_validate(s.cfg);
}

chi_status load_problem(const Options& o, Session& s) {
  chi_status st = load_config(o, s);
  if (st != CHI_OK) return st;
  if (o.image.empty() != o.mask.empty()) {
    std::fprintf(stderr, "error: --image and --mask must be given together\n");
    return CHI_ERR_VALIDATION;
  }
  if (o.image.empty()) return chi_problem_stripes(s.cfg, &s.problem);
  return chi_problem_from_images(s.cfg, o.image.c_str(), o.mask.c_str(), &s.problem);
}

chi_status get_double(const chi_config* cfg, const char* key, double& value) {
  char buf[64];
  const chi_status st = chi_config_get(cfg, key, buf, sizeof buf, nullptr);
  if (st == CHI_OK) value = std::strtod(buf, nullptr);
  return st;
}

const char* out_dir(const Options& o) { return o.out_dir.empty() ? nullptr : o.out_dir.c_str(); }

int cmd_mstar(const Options& o) {
  Session s;
  chi_status st = load_config(o, s);
  if (st != CHI_OK) return report(st);
  double theta = 0.0, theta_c = 0.0;
  if ((st = get_double(s.cfg, "theta", theta)) != CHI_OK || (st = get_double(s.cfg, "theta_c", theta_c)) != CHI_OK)
    return report(st);
  double m = 0.0, F[5];
  if ((st = chi_well_location(theta, theta_c, &m)) != CHI_OK) return report(st);
  if ((st = chi_potential_eval(theta, theta_c, m, F)) != CHI_OK) return report(st);
  std::printf("m_star = %.17g\n|F'(m_star)| = %.3e\n", m, std::fabs(F[1]));
  return 0;
}

int cmd_inpaint(const Options& o) {
  Session s;
  chi_status st = load_problem(o, s);
  if (st != CHI_OK) return report(st);
  chi_inpaint_summary r{};
  if ((st = chi_run_inpaint(s.cfg, s.problem, out_dir(o), &r)) != CHI_OK) return report(st);
  if (!o.quiet) {
    std::printf("lambda0 = %g\nfinal_time = %g\ncost = %.10g\n", r.lambda0, r.final_time, r.cost);
    std::printf("misfit_undamaged = %.10g\n", r.misfit_undamaged);
    if (r.match_damaged >= 0.0) std::printf("match_damaged = %.4f\n", r.match_damaged);
    std::printf("max_abs_phi = %.6f\nmass_balance_residual = %.3e\n", r.max_abs_phi, r.mass_balance_residual);
    std::printf("energy = %.10g -> %.10g\nclamp_events = %llu\n", r.energy_initial, r.energy_final,
                static_cast<unsigned long long>(r.clamp_events));
  }
  return 0;
}

int cmd_optimize(const Options& o) {
  Session s;
  chi_status st = load_problem(o, s);
  if (st != CHI_OK) return report(st);
  chi_optimize_summary r{};
  if ((st = chi_run_optimize(s.cfg, s.problem, out_dir(o), &r)) != CHI_OK) return report(st);
  if (!o.quiet) {
    std::printf("iterations = %d\nconverged = %s\n", r.iterations, r.converged ? "yes" : "no");
    std::printf("J = %.10g -> %.10g (%s)\n", r.cost_initial, r.cost_final, r.monotone ? "monotone" : "NOT monotone");
    std::printf("stationarity = %.3e\n", r.stationarity);
    std::printf("active_cells = %zu (lower %zu, upper %zu)\n", r.active_cells, r.lower_cells, r.upper_cells);
    std::printf("lambda0 range = [%g, %g]\n", r.min_lambda, r.max_lambda);
    std::printf("misfit_undamaged = %.10g\n", r.misfit_undamaged);
    if (r.match_damaged >= 0.0) std::printf("match_damaged = %.4f\n", r.match_damaged);
    if (r.curvature_used > 0 || r.curvature_skipped > 0)
      std::printf("second_order: %d directions used, %d skipped, min curvature %.3e\n", r.curvature_used,
                  r.curvature_skipped, r.min_curvature);
    std::printf("wall_seconds = %.2f\n", r.wall_seconds);
  }
  return r.converged ? 0 : kExitNumerical;
}

int cmd_grad_check(const Options& o) {
  Session s;
  chi_status st = load_problem(o, s);
  if (st != CHI_OK) return report(st);
  chi_check_summary r{};
  if ((st = chi_run_grad_check(s.cfg, s.problem, out_dir(o), &r)) != CHI_OK) return report(st);
  if (!o.quiet) std::printf("directions = %d\nmax_rel_error = %.3e\n", r.directions, r.max_rel_error);
  return 0;
}

int cmd_hess_check(const Options& o) {
  Session s;
  chi_status st = load_problem(o, s);
  if (st != CHI_OK) return report(st);
  chi_check_summary r{};
  if ((st = chi_run_hess_check(s.cfg, s.problem, out_dir(o), &r)) != CHI_OK) return report(st);
  if (!o.quiet)
    std::printf("directions = %d\nmax_rel_error = %.3e\nsymmetry_defect = %.3e\nmin_curvature = %.6e\n", r.directions,
                r.max_rel_error, r.symmetry_defect, r.min_curvature);
  return 0;
}

int cmd_decay(const Options& o) {
  Session s;
  chi_status st = load_problem(o, s);
  if (st != CHI_OK) return report(st);
  chi_decay_summary r{};
  double rates[64], r2[64];
  if ((st = chi_run_decay_experiment(s.cfg, s.problem, out_dir(o), &r, rates, r2, 64)) != CHI_OK) return report(st);
  if (!o.quiet) {
    std::printf("target: stationarity %.3e, euler-lagrange residual %.3e\n", r.target_stationarity,
                r.target_residual);
    for (size_t i = 0; i < r.rungs && i < 64; ++i) std::printf("rung %zu: rate %.6g, r2 %.4f\n", i, rates[i], r2[i]);
    std::printf("rates_increasing = %s\nmin_top_r2 = %.4f\n", r.rates_increasing ? "yes" : "no", r.min_top_r2);
    if (r.scan_rows >= 2) std::printf("eps_scan_degrades = %s\n", r.scan_degrades ? "yes" : "no");
  }
  return 0;
}

int cmd_export(const Options& o) {
  if (o.out_dir.empty()) {
    std::fprintf(stderr, "error: export-diagnostics needs --out-dir\n");
    return kExitValidation;
  }
  Session s;
  chi_status st = load_problem(o, s);
  if (st != CHI_OK) return report(st);
  if ((st = chi_export_diagnostics(s.cfg, s.problem, o.out_dir.c_str())) != CHI_OK) return report(st);
  if (!o.quiet) std::printf("wrote %s/trajectory.bin and %s/diagnostics.csv\n", o.out_dir.c_str(), o.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cahn-Hilliard inpainting with a logarithmic potential and optimal fidelity control"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--config", o.config, "key = value configuration file");
  app.add_option("--set", o.sets, "override a key, key=value (repeatable)")->allow_extra_args(false);
  app.add_option("--image", o.image, "grayscale image (PGM or PNG)");
  app.add_option("--mask", o.mask, "damaged-region mask image");
  app.add_option("--out-dir", o.out_dir, "directory for output files");
  app.add_flag("--quiet", o.quiet, "suppress the summary");

  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Cmd cmds[] = {
      {"inpaint", "forward solve at a constant fidelity", cmd_inpaint},
      {"optimize", "projected-gradient optimisation of the fidelity", cmd_optimize},
      {"grad-check", "adjoint gradient against finite differences", cmd_grad_check},
      {"hess-check", "Hessian against second differences", cmd_hess_check},
      {"decay-experiment", "H^-1 decay ladder and eps scan", cmd_decay},
      {"mstar", "print the well location", cmd_mstar},
      {"export-diagnostics", "write trajectory and diagnostics", cmd_export},
  };
  int rc = 0;
  for (const Cmd& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->callback([&rc, &o, run = c.run] { rc = run(o); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  return rc;
}
