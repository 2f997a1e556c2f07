/* C interface to the population-control library.
 *
 * Every fallible call returns a tyc_status. On failure, tyc_last_error()
 * describes the most recent error on the calling thread. Handles are
 * opaque; strings returned by tyc_run_* belong to the run and stay valid
 * until tyc_run_free. */
#ifndef TYC_H
#define TYC_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TYC_API __declspec(dllexport)
#else
#define TYC_API __attribute__((visibility("default")))
#endif

/* Values double as CLI exit codes. */
typedef enum tyc_status {
  TYC_OK = 0,
  TYC_ERR_INTERNAL = 1,
  TYC_ERR_VALIDATION = 2, /* bad config, parameters, or input file contents */
  TYC_ERR_NUMERICAL = 3,  /* blow-up, negative state, non-convergence */
  TYC_ERR_IO = 4
} tyc_status;

typedef struct tyc_scenario tyc_scenario;
typedef struct tyc_run tyc_run;

TYC_API const char* tyc_version(void);
/* Message for the last failed call on this thread; "" if none. */
TYC_API const char* tyc_last_error(void);
/* Grid time of the last accepted step when the last failure was a blow-up; NaN otherwise. */
TYC_API double tyc_last_blowup_time(void);

/* Scenario: defaults are the fitted parameters (beta 0.0057, delta 0.0648,
 * K 405), model tyc0, T = 200, dt = 0.05, equilibrium start. */
TYC_API tyc_status tyc_scenario_new(tyc_scenario** out);
/* INI or JSON, detected from the first non-blank character. */
TYC_API tyc_status tyc_scenario_from_string(const char* text, tyc_scenario** out);
TYC_API tyc_status tyc_scenario_from_file(const char* path, tyc_scenario** out);
/* key is "section.key", e.g. "model.id" or "grid.dt". */
TYC_API tyc_status tyc_scenario_set(tyc_scenario* scenario, const char* key, const char* value);
/* Output directory from [output] dir; valid while the scenario lives. */
TYC_API const char* tyc_scenario_out_dir(const tyc_scenario* scenario);
TYC_API void tyc_scenario_free(tyc_scenario* scenario);

/* Workflows. On success *out receives a run to inspect and free. A sweep
 * that does not converge still yields a run, with TYC_ERR_NUMERICAL. */
TYC_API tyc_status tyc_analyze(const tyc_scenario* scenario, tyc_run** out);
TYC_API tyc_status tyc_simulate(const tyc_scenario* scenario, tyc_run** out);
TYC_API tyc_status tyc_optimize(const tyc_scenario* scenario, tyc_run** out);
/* models: "tyc0,fhms1", "1-6", "all"; NULL uses the scenario's list. */
TYC_API tyc_status tyc_compare(const tyc_scenario* scenario, const char* models, tyc_run** out);
/* CSV `t,count` or `t,f,m`; the scenario's [params] are the starting guess (NULL for defaults). */
TYC_API tyc_status tyc_fit_file(const char* data_path, const tyc_scenario* guess, tyc_run** out);

/* Run products; "" when a workflow has no such product. */
TYC_API const char* tyc_run_json(const tyc_run* run);
TYC_API const char* tyc_run_csv(const tyc_run* run);
TYC_API const char* tyc_run_text(const tyc_run* run);
TYC_API const char* tyc_run_svg(const tyc_run* run);
/* Suggested file stem, e.g. "optimize_fhms1". */
TYC_API const char* tyc_run_stem(const tyc_run* run);
TYC_API int tyc_run_converged(const tyc_run* run);
TYC_API void tyc_run_free(tyc_run* run);

/* Low-level evaluations. model is 0..6 (tyc0, fhms1..fhms3, fhmh4..fhmh6);
 * params = {beta, delta, K}; controls = {mu, eta1, eta2, d1, d2};
 * state = {f, m, s}. */
TYC_API tyc_status tyc_rhs(int model, const double params[3], const double controls[5], const double state[3],
                           double out[3]);
TYC_API double tyc_logistic_factor(const double params[3], const double state[3]);
/* Closed-form roots of l^3 + 3d l^2 + 3d^2 l + d^2 for d = delta. */
TYC_API tyc_status tyc_boundary_eigenvalues(double delta, double re[3], double im[3]);

#ifdef __cplusplus
}
#endif

#endif /* TYC_H */
