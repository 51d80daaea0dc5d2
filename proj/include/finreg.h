/*
 * finreg - concave likelihood-based regression for finite-support responses.
 *
 * C interface to the solver library: opaque handles, integer status codes,
 * plain arrays. Infinite interval endpoints are passed as IEEE +-infinity.
 * All handles are freed with their matching *_free function. Functions return
 * FINREG_OK on success; on failure finreg_last_error() describes the problem
 * for the calling thread.
 */
#ifndef FINREG_H
#define FINREG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FINREG_API __declspec(dllexport)
#else
#define FINREG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define FINREG_OK 0
#define FINREG_ERR_INVALID 1 /* bad arguments / misuse */
#define FINREG_ERR_DATA 2    /* malformed or inconsistent data */
#define FINREG_ERR_NUMERIC 3 /* numerical failure */

/* family codes */
#define FINREG_FAMILY_GAUSSIAN 0
#define FINREG_FAMILY_LOGISTIC 1
#define FINREG_FAMILY_EXTREME_VALUE 2

/* scale modes for interval regression */
#define FINREG_SCALE_KNOWN 0
#define FINREG_SCALE_UNKNOWN 1

/* survival basis kinds */
#define FINREG_BASIS_EXPONENTIAL 0
#define FINREG_BASIS_WEIBULL 1
#define FINREG_BASIS_CUSTOM 2

/* coordinate roles */
#define FINREG_ROLE_COEFFICIENT 0
#define FINREG_ROLE_CUTPOINT 1
#define FINREG_ROLE_SCALE 2
#define FINREG_ROLE_SHAPE 3

typedef struct finreg_model finreg_model;
typedef struct finreg_fit finreg_fit;
typedef struct finreg_table finreg_table;
typedef struct finreg_cv finreg_cv;
typedef struct finreg_saved finreg_saved;
typedef struct finreg_dataset finreg_dataset;

FINREG_API const char* finreg_version(void);
FINREG_API const char* finreg_last_error(void);

/* ---- model construction (X row-major n x p) ---- */

FINREG_API int finreg_model_interval(int n, int p, const double* X, const double* lower,
                                     const double* upper, int scale, int family,
                                     finreg_model** out);
FINREG_API int finreg_model_cumulative(int n, int p, const double* X, const int* category,
                                       int n_categories, int family, finreg_model** out);
/* basis_lower/basis_upper are n x q row-major and may be NULL unless custom */
FINREG_API int finreg_model_survival(int n, int p, const double* X, const double* cut_lower,
                                     const double* cut_upper, int basis_kind, int q,
                                     const double* basis_lower, const double* basis_upper,
                                     finreg_model** out);
FINREG_API void finreg_model_free(finreg_model* m);

FINREG_API int finreg_model_dim(const finreg_model* m);
FINREG_API int finreg_model_nobs(const finreg_model* m);
FINREG_API int finreg_model_role(const finreg_model* m, int j);
FINREG_API int finreg_model_label(const finreg_model* m, int j, const char** out);
/* renames the trailing p predictor coordinates (cutpoint/scale/shape labels
 * are fixed by the model class) */
FINREG_API int finreg_model_set_predictor_names(finreg_model* m, const char* const* names, int p);

/* ---- solver ---- */

typedef struct finreg_options {
  double c1;      /* stationarity-map scaling (default 1) */
  double c2;      /* inner tolerance factor in [0,1) (default 0.25) */
  double c3;      /* sufficient-decrease constant in (0,1/2) (default 1e-4) */
  double shrink;  /* line-search factor in (0,1) (default 0.5) */
  double tol;     /* outer tolerance on the max-norm of J (default 1e-8) */
  double l0;      /* initial Lipschitz estimate for the accelerated solver */
  int max_outer, max_inner, max_linesearch, max_fista;
} finreg_options;

FINREG_API void finreg_options_default(finreg_options* o);

/* theta0 may be NULL (feasible default start); use_fista selects the
 * accelerated proximal-gradient solver instead of proximal Newton. */
FINREG_API int finreg_fit_run(const finreg_model* m, double lambda1, double lambda2,
                              const finreg_options* opts, const double* theta0, int use_fista,
                              finreg_fit** out);
FINREG_API void finreg_fit_free(finreg_fit* f);

FINREG_API int finreg_fit_dim(const finreg_fit* f);
FINREG_API int finreg_fit_coef(const finreg_fit* f, double* out);
FINREG_API double finreg_fit_objective(const finreg_fit* f);
FINREG_API double finreg_fit_neg_loglik(const finreg_fit* f);
FINREG_API double finreg_fit_j_norm(const finreg_fit* f);
FINREG_API int finreg_fit_converged(const finreg_fit* f);
FINREG_API int finreg_fit_iters(const finreg_fit* f, int* outer, long* inner);

/* ---- inference (unpenalized fits only) ---- */

FINREG_API int finreg_wald_table(const finreg_model* m, const finreg_fit* f, finreg_table** out);
FINREG_API void finreg_table_free(finreg_table* t);
FINREG_API int finreg_table_row(const finreg_table* t, int j, double* est, double* se, double* z,
                                double* p);
FINREG_API double finreg_table_loglik(const finreg_table* t);
FINREG_API double finreg_table_bic(const finreg_table* t);
FINREG_API int finreg_table_ok(const finreg_table* t);
FINREG_API int finreg_table_rank(const finreg_table* t);

FINREG_API int finreg_lrt(const finreg_fit* small_fit, const finreg_fit* large_fit, int df,
                          double* stat, double* p);
FINREG_API int finreg_bic(const finreg_fit* f, int n, int d_free, double* out);

/* ---- regularization path and cross-validation ---- */

FINREG_API int finreg_lambda_max(const finreg_model* m, double* out);
FINREG_API int finreg_lambda_path(const finreg_model* m, int n_lambda, double ratio,
                                  double* out_grid);
FINREG_API int finreg_cv_run(const finreg_model* m, double lambda2, const double* grid,
                             int n_lambda, int k_folds, uint64_t seed,
                             const finreg_options* opts, int n_threads, finreg_cv** out);
FINREG_API void finreg_cv_free(finreg_cv* cv);
FINREG_API int finreg_cv_size(const finreg_cv* cv);
FINREG_API int finreg_cv_curve(const finreg_cv* cv, double* lambdas, double* mean_loss,
                               double* se_loss);
FINREG_API double finreg_cv_selected(const finreg_cv* cv);
FINREG_API int finreg_cv_selected_index(const finreg_cv* cv);
FINREG_API long finreg_cv_failed_cells(const finreg_cv* cv);
FINREG_API int finreg_cv_fold_of(const finreg_cv* cv, int i);

/* ---- saved fits and prediction ---- */

/* theta_override (length d) replaces the stored coefficients, e.g. after
 * undoing predictor standardization; pass NULL to save the fit as-is. */
FINREG_API int finreg_fit_save(const finreg_model* m, const finreg_fit* f,
                               const double* theta_override, const char* path);
FINREG_API int finreg_fit_load(const char* path, finreg_saved** out);
FINREG_API void finreg_saved_free(finreg_saved* s);
FINREG_API int finreg_saved_dim(const finreg_saved* s);
FINREG_API int finreg_saved_n_predictors(const finreg_saved* s);
FINREG_API int finreg_saved_n_cells(const finreg_saved* s);
FINREG_API int finreg_saved_coef(const finreg_saved* s, double* out);
FINREG_API int finreg_saved_predictor_name(const finreg_saved* s, int j, const char** out);
FINREG_API int finreg_saved_predict(const finreg_saved* s, const double* x, double* probs);

/* ---- dataset ingestion (CSV with header; see README for the format) ---- */

FINREG_API int finreg_dataset_read(const char* path, finreg_dataset** out);
FINREG_API void finreg_dataset_free(finreg_dataset* d);
FINREG_API int finreg_dataset_nobs(const finreg_dataset* d);
FINREG_API int finreg_dataset_npred(const finreg_dataset* d);
FINREG_API int finreg_dataset_has_category(const finreg_dataset* d);
FINREG_API int finreg_dataset_has_intervals(const finreg_dataset* d);
FINREG_API int finreg_dataset_predictors(const finreg_dataset* d, double* X);
FINREG_API int finreg_dataset_bounds(const finreg_dataset* d, double* lower, double* upper);
FINREG_API int finreg_dataset_categories(const finreg_dataset* d, int* category);
FINREG_API int finreg_dataset_column_name(const finreg_dataset* d, int j, const char** out);

/* ---- simulation harness ---- */

typedef struct finreg_sim_config {
  int setting; /* 0 extreme-value low-dim, 1 gaussian high-dim */
  int n, p, replications;
  double interval_size;
  uint64_t seed;
  int k_folds, n_lambda;
  double lambda_ratio;
  int n_threads;
} finreg_sim_config;

typedef struct finreg_sim_report {
  double lik_sse, lik_sse_se, lik_misclass, lik_misclass_se;
  double naive_sse, naive_sse_se, naive_misclass, naive_misclass_se;
  int failed_replications;
} finreg_sim_report;

FINREG_API void finreg_sim_config_default(finreg_sim_config* c);
FINREG_API int finreg_simulate(const finreg_sim_config* c, finreg_sim_report* out);
/* single run with file outputs; any path and the report pointer may be NULL */
FINREG_API int finreg_simulate_files(const finreg_sim_config* c, const char* json_path,
                                     const char* csv_path, const char* tidy_path,
                                     finreg_sim_report* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FINREG_H */
