#include "chinpaint/chinpaint.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "capi/commands.hpp"
#include "core/error.hpp"

struct chi_config {
  chinpaint::RunConfig cfg;
};

struct chi_field {
  chinpaint::Field field;
};

struct chi_problem {
  chinpaint::app::Problem problem;
};

namespace {

using chinpaint::Error;
using chinpaint::ErrorCode;

thread_local std::string last_error;
thread_local std::string last_kind;

void clear_error() {
  last_error.clear();
  last_kind.clear();
}

chi_status fail(chi_status status, const std::string& kind, const std::string& message) {
  last_kind = kind;
  last_error = message;
  return status;
}

chi_status status_of(ErrorCode code) {
  if (chinpaint::is_numerical(code)) return CHI_ERR_NUMERICAL;
  if (code == ErrorCode::Io) return CHI_ERR_IO;
  return CHI_ERR_VALIDATION;
}

template <class Fn>
chi_status guard(Fn&& fn) {
  clear_error();
  try {
    fn();
    return CHI_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), chinpaint::to_string(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CHI_ERR_NUMERICAL, "OutOfMemory", "out of memory");
  } catch (const std::exception& e) {
    return fail(CHI_ERR_INVALID_ARGUMENT, "Internal", e.what());
  }
}

chi_status null_arg(const char* what) {
  return fail(CHI_ERR_INVALID_ARGUMENT, "InvalidArgument", std::string("null argument: ") + what);
}

chi_status copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buf) return CHI_OK;
  if (cap < text.size() + 1) return fail(CHI_ERR_INVALID_ARGUMENT, "InvalidArgument", "buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return CHI_OK;
}

std::string dir_or_empty(const char* out_dir) { return out_dir ? std::string(out_dir) : std::string(); }

}  // namespace

extern "C" {

const char* chi_last_error(void) { return last_error.c_str(); }
const char* chi_last_error_kind(void) { return last_kind.c_str(); }
const char* chi_version(void) { return "1.0.0"; }

chi_status chi_config_new(chi_config** out) {
  if (!out) return null_arg("out");
  return guard([&] { *out = new chi_config{}; });
}

chi_status chi_config_load(const char* path, chi_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guard([&] { *out = new chi_config{chinpaint::load_config(path)}; });
}

chi_status chi_config_set(chi_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_arg("cfg");
  if (!key || !value) return null_arg("key/value");
  return guard([&] { chinpaint::apply_key(cfg->cfg, key, value); });
}

chi_status chi_config_apply(chi_config* cfg, const char* assignment) {
  if (!cfg) return null_arg("cfg");
  if (!assignment) return null_arg("assignment");
  return guard([&] { chinpaint::apply_override(cfg->cfg, assignment); });
}

chi_status chi_config_validate(const chi_config* cfg) {
  if (!cfg) return null_arg("cfg");
  return guard([&] { cfg->cfg.validate(); });
}

chi_status chi_config_dump(const chi_config* cfg, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return null_arg("cfg");
  std::string text;
  const chi_status st = guard([&] { text = chinpaint::dump_config(cfg->cfg); });
  return st != CHI_OK ? st : copy_out(text, buf, cap, needed);
}

chi_status chi_config_get(const chi_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  std::string text;
  const chi_status st = guard([&] { text = chinpaint::get_key(cfg->cfg, key); });
  return st != CHI_OK ? st : copy_out(text, buf, cap, needed);
}

void chi_config_free(chi_config* cfg) { delete cfg; }

chi_status chi_well_location(double theta, double theta_c, double* m_star) {
  if (!m_star) return null_arg("m_star");
  return guard([&] {
    chinpaint::PotentialParams p;
    p.theta = theta;
    p.theta_c = theta_c;
    *m_star = chinpaint::well_location(p);
  });
}

chi_status chi_potential_eval(double theta, double theta_c, double s, double out[5]) {
  if (!out) return null_arg("out");
  return guard([&] {
    chinpaint::PotentialParams p;
    p.theta = theta;
    p.theta_c = theta_c;
    const chinpaint::Potential pot(p);
    out[0] = pot.F(s);
    out[1] = pot.F1d(s);
    out[2] = pot.F2d(s);
    out[3] = pot.F3d(s);
    out[4] = pot.F4d(s);
  });
}

chi_status chi_field_new(int nx, int ny, double lx, double ly, const double* values, chi_field** out) {
  if (!out) return null_arg("out");
  return guard([&] {
    const chinpaint::Grid g = chinpaint::Grid::make(nx, ny, lx, ly);
    chinpaint::Field f(g);
    if (values) std::memcpy(f.data(), values, f.size() * sizeof(double));
    *out = new chi_field{std::move(f)};
  });
}

chi_status chi_field_shape(const chi_field* f, int* nx, int* ny, double* lx, double* ly) {
  if (!f) return null_arg("field");
  clear_error();
  const chinpaint::Grid& g = f->field.grid();
  if (nx) *nx = g.nx;
  if (ny) *ny = g.ny;
  if (lx) *lx = g.lx;
  if (ly) *ly = g.ly;
  return CHI_OK;
}

chi_status chi_field_values(const chi_field* f, double* out, size_t count) {
  if (!f) return null_arg("field");
  if (!out) return null_arg("out");
  clear_error();
  if (count < f->field.size()) return fail(CHI_ERR_INVALID_ARGUMENT, "InvalidArgument", "buffer too small");
  std::memcpy(out, f->field.data(), f->field.size() * sizeof(double));
  return CHI_OK;
}

void chi_field_free(chi_field* f) { delete f; }

chi_status chi_problem_stripes(const chi_config* cfg, chi_problem** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guard([&] { *out = new chi_problem{chinpaint::app::stripes_problem(cfg->cfg)}; });
}

chi_status chi_problem_from_images(const chi_config* cfg, const char* image_path, const char* mask_path,
                                   chi_problem** out) {
  if (!cfg) return null_arg("cfg");
  if (!image_path || !mask_path) return null_arg("image_path/mask_path");
  if (!out) return null_arg("out");
  return guard([&] { *out = new chi_problem{chinpaint::app::image_problem(cfg->cfg, image_path, mask_path)}; });
}

chi_status chi_problem_get(const chi_problem* p, chi_problem_part part, chi_field** out) {
  if (!p) return null_arg("problem");
  if (!out) return null_arg("out");
  clear_error();
  const chinpaint::app::Problem& pr = p->problem;
  const chinpaint::Field* src = nullptr;
  switch (part) {
    case CHI_PART_TARGET: src = &pr.f; break;
    case CHI_PART_MASK: src = &pr.mask_D; break;
    case CHI_PART_INITIAL: src = &pr.phi0; break;
    case CHI_PART_TRUTH:
      if (!pr.truth) return fail(CHI_ERR_INVALID_ARGUMENT, "InvalidArgument", "problem has no ground truth");
      src = &*pr.truth;
      break;
    default: return fail(CHI_ERR_INVALID_ARGUMENT, "InvalidArgument", "unknown problem part");
  }
  return guard([&] { *out = new chi_field{*src}; });
}

int chi_problem_has_truth(const chi_problem* p) { return p && p->problem.truth ? 1 : 0; }

void chi_problem_free(chi_problem* p) { delete p; }

chi_status chi_run_inpaint(const chi_config* cfg, const chi_problem* p, const char* out_dir,
                           chi_inpaint_summary* out) {
  if (!cfg) return null_arg("cfg");
  if (!p) return null_arg("problem");
  return guard([&] {
    const auto r = chinpaint::app::run_inpaint(cfg->cfg, p->problem, dir_or_empty(out_dir));
    if (!out) return;
    out->lambda0 = r.lambda0;
    out->final_time = r.final_time;
    out->cost = r.cost;
    out->misfit_undamaged = r.misfit;
    out->match_damaged = r.match;
    out->max_abs_phi = r.max_abs_phi;
    out->mass_balance_residual = r.mass_balance;
    out->energy_initial = r.energy_initial;
    out->energy_final = r.energy_final;
    out->clamp_events = r.clamp_events;
  });
}

chi_status chi_run_optimize(const chi_config* cfg, const chi_problem* p, const char* out_dir,
                            chi_optimize_summary* out) {
  if (!cfg) return null_arg("cfg");
  if (!p) return null_arg("problem");
  return guard([&] {
    const auto r = chinpaint::app::run_optimize(cfg->cfg, p->problem, dir_or_empty(out_dir));
    if (!out) return;
    const auto& rep = r.optim.report;
    *out = chi_optimize_summary{};
    out->iterations = rep.iterations;
    out->converged = rep.converged ? 1 : 0;
    out->cost_initial = r.cost_initial;
    out->cost_final = r.optim.final_eval.J;
    out->stationarity = rep.history.back().stationarity;
    out->monotone = r.monotone ? 1 : 0;
    out->active_cells = rep.active_cells;
    out->lower_cells = rep.lower_cells;
    out->upper_cells = rep.upper_cells;
    out->min_lambda = rep.history.back().min_lambda;
    out->max_lambda = rep.history.back().max_lambda;
    out->misfit_undamaged = r.misfit;
    out->match_damaged = r.match;
    if (r.second_order) {
      out->curvature_used = r.second_order->used;
      out->curvature_skipped = r.second_order->skipped;
      out->min_curvature = r.second_order->min_curvature;
    }
    out->wall_seconds = rep.wall_seconds;
  });
}

chi_status chi_run_grad_check(const chi_config* cfg, const chi_problem* p, const char* out_dir,
                              chi_check_summary* out) {
  if (!cfg) return null_arg("cfg");
  if (!p) return null_arg("problem");
  return guard([&] {
    const auto r = chinpaint::app::run_grad_check(cfg->cfg, p->problem, dir_or_empty(out_dir));
    if (out) *out = chi_check_summary{static_cast<int>(r.checks.size()), r.max_rel_error, 0.0, 0.0};
  });
}

chi_status chi_run_hess_check(const chi_config* cfg, const chi_problem* p, const char* out_dir,
                              chi_check_summary* out) {
  if (!cfg) return null_arg("cfg");
  if (!p) return null_arg("problem");
  return guard([&] {
    const auto r = chinpaint::app::run_hess_check(cfg->cfg, p->problem, dir_or_empty(out_dir));
    if (out)
      *out = chi_check_summary{static_cast<int>(r.checks.size()), r.max_rel_error, r.symmetry_defect,
                               r.min_curvature};
  });
}

chi_status chi_run_decay_experiment(const chi_config* cfg, const chi_problem* p, const char* out_dir,
                                    chi_decay_summary* out, double* rates, double* r2, size_t cap) {
  if (!cfg) return null_arg("cfg");
  if (!p) return null_arg("problem");
  return guard([&] {
    const auto r = chinpaint::app::run_decay_experiment(cfg->cfg, p->problem, dir_or_empty(out_dir));
    const auto& reps = r.reports;
    for (std::size_t i = 0; i < reps.size() && i < cap; ++i) {
      if (rates) rates[i] = reps[i].fitted_rate;
      if (r2) r2[i] = reps[i].fit_r2;
    }
    if (!out) return;
    *out = chi_decay_summary{};
    out->rungs = reps.size();
    out->rates_increasing = 1;
    for (std::size_t i = 1; i < reps.size(); ++i)
      if (!(reps[i].fitted_rate > reps[i - 1].fitted_rate)) out->rates_increasing = 0;
    out->min_top_r2 = reps.empty() ? 0.0 : reps.back().fit_r2;
    if (reps.size() >= 2) out->min_top_r2 = std::min(reps[reps.size() - 1].fit_r2, reps[reps.size() - 2].fit_r2);
    out->scan_rows = r.scan.size();
    if (r.scan.size() >= 2) {
      auto lo = r.scan.front(), hi = r.scan.front();
      for (const auto& row : r.scan) {
        if (row.eps < lo.eps) lo = row;
        if (row.eps > hi.eps) hi = row;
      }
      out->scan_degrades = hi.fitted_rate > lo.fitted_rate ? 1 : 0;
    }
    out->target_residual = r.target.euler_lagrange_residual;
    out->target_stationarity = r.target.stationarity;
  });
}

chi_status chi_export_diagnostics(const chi_config* cfg, const chi_problem* p, const char* out_dir) {
  if (!cfg) return null_arg("cfg");
  if (!p) return null_arg("problem");
  if (!out_dir) return null_arg("out_dir");
  return guard([&] { chinpaint::app::export_diagnostics(cfg->cfg, p->problem, out_dir); });
}

}  // extern "C"
