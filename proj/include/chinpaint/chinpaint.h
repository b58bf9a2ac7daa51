#ifndef CHINPAINT_H
#define CHINPAINT_H

/* C interface to the Cahn-Hilliard inpainting library.
 *
 * Every function returns a chi_status; on failure chi_last_error() holds a
 * message for the calling thread. Handles are opaque and owned by the caller
 * once returned; release them with the matching *_free function (NULL is
 * accepted). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CHI_API __declspec(dllexport)
#else
#define CHI_API __attribute__((visibility("default")))
#endif

typedef enum chi_status {
  CHI_OK = 0,
  CHI_ERR_INVALID_ARGUMENT = 1, /* bad pointer, unknown enum, buffer too small */
  CHI_ERR_VALIDATION = 2,       /* config, box, mask, grid or format problems */
  CHI_ERR_NUMERICAL = 3,        /* solver or optimizer failure */
  CHI_ERR_IO = 4
} chi_status;

typedef struct chi_config chi_config;
typedef struct chi_field chi_field;
typedef struct chi_problem chi_problem;

/* Message of the last failure on this thread ("" if none). */
CHI_API const char* chi_last_error(void);
/* Name of the library error behind the last failure, e.g. "PicardDiverged". */
CHI_API const char* chi_last_error_kind(void);
CHI_API const char* chi_version(void);

/* ---- configuration ---------------------------------------------------- */

CHI_API chi_status chi_config_new(chi_config** out);
CHI_API chi_status chi_config_load(const char* path, chi_config** out);
/* Same syntax as a config line: key and value as text. */
CHI_API chi_status chi_config_set(chi_config* cfg, const char* key, const char* value);
/* "key=value" */
CHI_API chi_status chi_config_apply(chi_config* cfg, const char* assignment);
/* Value of one key as config text; same buffer protocol as chi_config_dump. */
CHI_API chi_status chi_config_get(const chi_config* cfg, const char* key, char* buf, size_t cap, size_t* needed);
CHI_API chi_status chi_config_validate(const chi_config* cfg);
/* Writes the full key list as config text. *needed receives the size
 * including the terminator; buf may be NULL to query it. */
CHI_API chi_status chi_config_dump(const chi_config* cfg, char* buf, size_t cap, size_t* needed);
CHI_API void chi_config_free(chi_config* cfg);

/* ---- potential -------------------------------------------------------- */

/* Positive root of F'(m) = 0. */
CHI_API chi_status chi_well_location(double theta, double theta_c, double* m_star);
/* out[0..4] = F, F', F'', F''', F'''' at s (clamped evaluation). */
CHI_API chi_status chi_potential_eval(double theta, double theta_c, double s, double out[5]);

/* ---- fields ----------------------------------------------------------- */

/* values: nx*ny samples, row-major with x fastest; NULL gives zeros. */
CHI_API chi_status chi_field_new(int nx, int ny, double lx, double ly, const double* values, chi_field** out);
CHI_API chi_status chi_field_shape(const chi_field* f, int* nx, int* ny, double* lx, double* ly);
CHI_API chi_status chi_field_values(const chi_field* f, double* out, size_t count);
CHI_API void chi_field_free(chi_field* f);

/* ---- problems --------------------------------------------------------- */

/* Built-in stripes with a central square hole, sized by the config grid
 * (stripe_period, stripe_hole, blur_sigma). */
CHI_API chi_status chi_problem_stripes(const chi_config* cfg, chi_problem** out);
/* Grayscale image (PGM P2/P5 or PNG) and mask image, binarised. */
CHI_API chi_status chi_problem_from_images(const chi_config* cfg, const char* image_path, const char* mask_path,
                                           chi_problem** out);

typedef enum chi_problem_part {
  CHI_PART_TARGET = 0,  /* f: +-m* off D, 0 on D */
  CHI_PART_MASK = 1,    /* chi_D */
  CHI_PART_INITIAL = 2, /* phi0 */
  CHI_PART_TRUTH = 3    /* ground truth (built-in stripes only) */
} chi_problem_part;

CHI_API chi_status chi_problem_get(const chi_problem* p, chi_problem_part part, chi_field** out);
CHI_API int chi_problem_has_truth(const chi_problem* p);
CHI_API void chi_problem_free(chi_problem* p);

/* ---- commands ----------------------------------------------------------
 * out_dir may be NULL to skip file output. */

typedef struct chi_inpaint_summary {
  double lambda0;
  double final_time;
  double cost;
  double misfit_undamaged; /* ||phi(T) - f||_{L2(Omega\D)} */
  double match_damaged;    /* fraction of D where sign(phi(T)) == sign(truth); -1 without truth */
  double max_abs_phi;
  double mass_balance_residual;
  double energy_initial;
  double energy_final;
  uint64_t clamp_events;
} chi_inpaint_summary;

CHI_API chi_status chi_run_inpaint(const chi_config* cfg, const chi_problem* p, const char* out_dir,
                                   chi_inpaint_summary* out);

typedef struct chi_optimize_summary {
  int iterations;
  int converged;
  double cost_initial;
  double cost_final;
  double stationarity;
  int monotone; /* accepted costs nonincreasing */
  size_t active_cells;
  size_t lower_cells;
  size_t upper_cells;
  double min_lambda;
  double max_lambda;
  double misfit_undamaged;
  double match_damaged;
  int curvature_used;
  int curvature_skipped;
  double min_curvature;
  double wall_seconds;
} chi_optimize_summary;

/* Projected gradient from the constant (lambda_min + lambda_max)/2 followed
 * by the second-order check with second_order_dirs directions (alpha2 = 0
 * only; otherwise curvature_used = 0). */
CHI_API chi_status chi_run_optimize(const chi_config* cfg, const chi_problem* p, const char* out_dir,
                                    chi_optimize_summary* out);

typedef struct chi_check_summary {
  int directions;
  double max_rel_error;
  double symmetry_defect; /* hess-check only */
  double min_curvature;   /* hess-check only: min D2J[h,h] over the directions */
} chi_check_summary;

/* Adjoint gradient against central differences of J at a random control
 * spread half a decade around lambda0 (or the geometric mean of the box),
 * seeded by `seed`. */
CHI_API chi_status chi_run_grad_check(const chi_config* cfg, const chi_problem* p, const char* out_dir,
                                      chi_check_summary* out);
/* Hessian form against second differences, plus symmetry. */
CHI_API chi_status chi_run_hess_check(const chi_config* cfg, const chi_problem* p, const char* out_dir,
                                      chi_check_summary* out);

typedef struct chi_decay_summary {
  size_t rungs;
  int rates_increasing;
  double min_top_r2; /* min R^2 over the two largest lambda0 */
  size_t scan_rows;
  int scan_degrades; /* rate at the largest eps above rate at the smallest */
  double target_residual;
  double target_stationarity;
} chi_decay_summary;

/* Writes decay_<lambda0>.csv, decay_summary.csv and eps_scan.csv. rates and
 * r2 (may be NULL) receive one entry per decay_lambdas value, at most cap. */
CHI_API chi_status chi_run_decay_experiment(const chi_config* cfg, const chi_problem* p, const char* out_dir,
                                            chi_decay_summary* out, double* rates, double* r2, size_t cap);

/* Forward solve at the constant control: trajectory.bin and diagnostics.csv. */
CHI_API chi_status chi_export_diagnostics(const chi_config* cfg, const chi_problem* p, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
