#include "finreg.h"

#include <cstring>
#include <fstream>

#include "finreg/cv.hpp"
#include "finreg/dataset.hpp"
#include "finreg/simulate.hpp"

using namespace finreg;

struct finreg_model {
  ModelData m;
};
struct finreg_fit {
  FitResult r;
};
struct finreg_table {
  InferenceTable t;
};
struct finreg_cv {
  CvResult r;
};
struct finreg_saved {
  SavedFit s;
};
struct finreg_dataset {
  Dataset d;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return FINREG_OK;
  } catch (const data_error& e) {
    return set_error(FINREG_ERR_DATA, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(FINREG_ERR_INVALID, e.what());
  } catch (const std::domain_error& e) {
    return set_error(FINREG_ERR_NUMERIC, e.what());
  } catch (const numeric_error& e) {
    return set_error(FINREG_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return set_error(FINREG_ERR_NUMERIC, e.what());
  }
}

Family family_from_code(int f) {
  switch (f) {
    case FINREG_FAMILY_GAUSSIAN: return Family::gaussian;
    case FINREG_FAMILY_LOGISTIC: return Family::logistic;
    case FINREG_FAMILY_EXTREME_VALUE: return Family::extreme_value;
  }
  throw std::invalid_argument("unknown family code");
}

Eigen::MatrixXd matrix_from_rowmajor(int n, int p, const double* X) {
  Eigen::MatrixXd out(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) out(i, j) = X[static_cast<size_t>(i) * p + j];
  return out;
}

std::vector<ExtReal> endpoints_from(const double* v, int n) {
  std::vector<ExtReal> out(n);
  for (int i = 0; i < n; ++i) out[i] = ExtReal::from_double(v[i]);
  return out;
}

SolverOptions convert_options(const finreg_options* o) {
  SolverOptions s;
  if (!o) return s;
  s.c1 = o->c1;
  s.c2 = o->c2;
  s.c3 = o->c3;
  s.shrink = o->shrink;
  s.tol = o->tol;
  s.L0 = o->l0;
  s.max_outer = o->max_outer;
  s.max_inner = o->max_inner;
  s.max_linesearch = o->max_linesearch;
  s.max_fista = o->max_fista;
  return s;
}

SimConfig convert_sim_config(const finreg_sim_config* c) {
  SimConfig cfg;
  cfg.setting = c->setting == 1 ? SimSetting::gaussian_highdim : SimSetting::extreme_value_lowdim;
  cfg.n = c->n;
  cfg.p = c->p;
  cfg.replications = c->replications;
  cfg.interval_size = c->interval_size;
  cfg.seed = c->seed;
  cfg.k_folds = c->k_folds;
  cfg.n_lambda = c->n_lambda;
  cfg.lambda_ratio = c->lambda_ratio;
  cfg.n_threads = c->n_threads;
  return cfg;
}

}  // namespace

extern "C" {

const char* finreg_version(void) { return "0.1.0"; }
const char* finreg_last_error(void) { return g_last_error.c_str(); }

int finreg_model_interval(int n, int p, const double* X, const double* lower, const double* upper,
                          int scale, int family, finreg_model** out) {
  return guarded([&] {
    if (!X || !lower || !upper || !out || n < 1 || p < 0)
      throw std::invalid_argument("finreg_model_interval: bad arguments");
    *out = new finreg_model{build_interval_regression(
        matrix_from_rowmajor(n, p, X), endpoints_from(lower, n), endpoints_from(upper, n),
        scale == FINREG_SCALE_UNKNOWN ? ScaleMode::unknown : ScaleMode::known_one,
        family_from_code(family))};
  });
}

int finreg_model_cumulative(int n, int p, const double* X, const int* category, int n_categories,
                            int family, finreg_model** out) {
  return guarded([&] {
    if (!category || !out || n < 1 || p < 0 || (p > 0 && !X))
      throw std::invalid_argument("finreg_model_cumulative: bad arguments");
    Eigen::MatrixXd Xm = p > 0 ? matrix_from_rowmajor(n, p, X) : Eigen::MatrixXd::Zero(n, 0);
    std::vector<int> y(category, category + n);
    *out = new finreg_model{build_cumulative(y, n_categories, Xm, family_from_code(family))};
  });
}

int finreg_model_survival(int n, int p, const double* X, const double* cut_lower,
                          const double* cut_upper, int basis_kind, int q,
                          const double* basis_lower, const double* basis_upper,
                          finreg_model** out) {
  return guarded([&] {
    if (!X || !cut_lower || !cut_upper || !out || n < 1 || p < 0)
      throw std::invalid_argument("finreg_model_survival: bad arguments");
    SurvivalBasis basis;
    basis.kind = basis_kind == FINREG_BASIS_WEIBULL
                     ? SurvivalBasisKind::weibull
                     : (basis_kind == FINREG_BASIS_CUSTOM ? SurvivalBasisKind::custom
                                                          : SurvivalBasisKind::exponential);
    if (basis.kind == SurvivalBasisKind::custom) {
      if (!basis_lower || !basis_upper || q < 1)
        throw std::invalid_argument("custom basis requires n x q basis value matrices");
      basis.at_lower = matrix_from_rowmajor(n, q, basis_lower);
      basis.at_upper = matrix_from_rowmajor(n, q, basis_upper);
    }
    std::vector<double> lo(cut_lower, cut_lower + n);
    *out = new finreg_model{build_survival(lo, endpoints_from(cut_upper, n),
                                           matrix_from_rowmajor(n, p, X), basis)};
  });
}

void finreg_model_free(finreg_model* m) { delete m; }
int finreg_model_dim(const finreg_model* m) { return m ? m->m.d : 0; }
int finreg_model_nobs(const finreg_model* m) { return m ? m->m.n : 0; }

int finreg_model_role(const finreg_model* m, int j) {
  if (!m || j < 0 || j >= m->m.d) return -1;
  return static_cast<int>(m->m.roles[j]);
}

int finreg_model_label(const finreg_model* m, int j, const char** out) {
  return guarded([&] {
    if (!m || !out || j < 0 || j >= m->m.d) throw std::invalid_argument("bad label index");
    *out = m->m.labels[j].c_str();
  });
}

int finreg_model_set_predictor_names(finreg_model* m, const char* const* names, int p) {
  return guarded([&] {
    if (!m || !names) throw std::invalid_argument("finreg_model_set_predictor_names: bad arguments");
    if (p != static_cast<int>(m->m.inputs.X.cols()))
      throw std::invalid_argument("name count does not match predictor count");
    for (int j = 0; j < p; ++j) m->m.labels[m->m.d - p + j] = names[j];
  });
}

void finreg_options_default(finreg_options* o) {
  if (!o) return;
  const SolverOptions s;
  o->c1 = s.c1;
  o->c2 = s.c2;
  o->c3 = s.c3;
  o->shrink = s.shrink;
  o->tol = s.tol;
  o->l0 = s.L0;
  o->max_outer = s.max_outer;
  o->max_inner = s.max_inner;
  o->max_linesearch = s.max_linesearch;
  o->max_fista = s.max_fista;
}

int finreg_fit_run(const finreg_model* m, double lambda1, double lambda2,
                   const finreg_options* opts, const double* theta0, int use_fista,
                   finreg_fit** out) {
  return guarded([&] {
    if (!m || !out) throw std::invalid_argument("finreg_fit_run: bad arguments");
    PenaltySpec pen = m->m.penalty_default;
    pen.lambda1 = lambda1;
    pen.lambda2 = lambda2;
    std::optional<Eigen::VectorXd> start;
    if (theta0) start = Eigen::Map<const Eigen::VectorXd>(theta0, m->m.d);
    const SolverOptions so = convert_options(opts);
    *out = new finreg_fit{use_fista ? fit_fista(m->m, pen, so, start) : fit(m->m, pen, so, start)};
  });
}

void finreg_fit_free(finreg_fit* f) { delete f; }
int finreg_fit_dim(const finreg_fit* f) { return f ? static_cast<int>(f->r.theta.size()) : 0; }

int finreg_fit_coef(const finreg_fit* f, double* out) {
  return guarded([&] {
    if (!f || !out) throw std::invalid_argument("finreg_fit_coef: bad arguments");
    Eigen::Map<Eigen::VectorXd>(out, f->r.theta.size()) = f->r.theta;
  });
}

double finreg_fit_objective(const finreg_fit* f) { return f ? f->r.objective : 0; }
double finreg_fit_neg_loglik(const finreg_fit* f) { return f ? f->r.neg_loglik : 0; }
double finreg_fit_j_norm(const finreg_fit* f) { return f ? f->r.j_norm : 0; }
int finreg_fit_converged(const finreg_fit* f) { return f && f->r.converged ? 1 : 0; }

int finreg_fit_iters(const finreg_fit* f, int* outer, long* inner) {
  if (!f) return FINREG_ERR_INVALID;
  if (outer) *outer = f->r.outer_iters;
  if (inner) *inner = f->r.total_inner_iters;
  return FINREG_OK;
}

int finreg_wald_table(const finreg_model* m, const finreg_fit* f, finreg_table** out) {
  return guarded([&] {
    if (!m || !f || !out) throw std::invalid_argument("finreg_wald_table: bad arguments");
    *out = new finreg_table{wald_table(m->m, f->r)};
  });
}

void finreg_table_free(finreg_table* t) { delete t; }

int finreg_table_row(const finreg_table* t, int j, double* est, double* se, double* z, double* p) {
  return guarded([&] {
    if (!t || j < 0 || j >= t->t.estimates.size()) throw std::invalid_argument("bad table row");
    if (est) *est = t->t.estimates[j];
    if (se) *se = t->t.std_errors[j];
    if (z) *z = t->t.z_values[j];
    if (p) *p = t->t.p_values[j];
  });
}

double finreg_table_loglik(const finreg_table* t) { return t ? t->t.loglik : 0; }
double finreg_table_bic(const finreg_table* t) { return t ? t->t.bic : 0; }
int finreg_table_ok(const finreg_table* t) { return t && t->t.info_ok ? 1 : 0; }
int finreg_table_rank(const finreg_table* t) { return t ? t->t.info_rank : 0; }

int finreg_lrt(const finreg_fit* small_fit, const finreg_fit* large_fit, int df, double* stat,
               double* p) {
  return guarded([&] {
    if (!small_fit || !large_fit) throw std::invalid_argument("finreg_lrt: bad arguments");
    const LrtResult r = lrt(small_fit->r, large_fit->r, df);
    if (stat) *stat = r.stat;
    if (p) *p = r.p;
  });
}

int finreg_bic(const finreg_fit* f, int n, int d_free, double* out) {
  return guarded([&] {
    if (!f || !out) throw std::invalid_argument("finreg_bic: bad arguments");
    *out = bic(f->r, n, d_free);
  });
}

int finreg_lambda_max(const finreg_model* m, double* out) {
  return guarded([&] {
    if (!m || !out) throw std::invalid_argument("finreg_lambda_max: bad arguments");
    *out = lambda_max(m->m, m->m.penalty_default);
  });
}

int finreg_lambda_path(const finreg_model* m, int n_lambda, double ratio, double* out_grid) {
  return guarded([&] {
    if (!m || !out_grid) throw std::invalid_argument("finreg_lambda_path: bad arguments");
    const Eigen::VectorXd g = lambda_path(m->m, m->m.penalty_default, n_lambda, ratio);
    Eigen::Map<Eigen::VectorXd>(out_grid, g.size()) = g;
  });
}

int finreg_cv_run(const finreg_model* m, double lambda2, const double* grid, int n_lambda,
                  int k_folds, uint64_t seed, const finreg_options* opts, int n_threads,
                  finreg_cv** out) {
  return guarded([&] {
    if (!m || !grid || !out || n_lambda < 1)
      throw std::invalid_argument("finreg_cv_run: bad arguments");
    PenaltySpec tmpl = m->m.penalty_default;
    tmpl.lambda2 = lambda2;
    const Eigen::Map<const Eigen::VectorXd> g(grid, n_lambda);
    *out = new finreg_cv{
        kfold_cv(m->m, tmpl, g, k_folds, seed, convert_options(opts), n_threads)};
  });
}

void finreg_cv_free(finreg_cv* cv) { delete cv; }
int finreg_cv_size(const finreg_cv* cv) { return cv ? static_cast<int>(cv->r.lambdas.size()) : 0; }

int finreg_cv_curve(const finreg_cv* cv, double* lambdas, double* mean_loss, double* se_loss) {
  return guarded([&] {
    if (!cv) throw std::invalid_argument("finreg_cv_curve: bad arguments");
    const auto L = cv->r.lambdas.size();
    if (lambdas) Eigen::Map<Eigen::VectorXd>(lambdas, L) = cv->r.lambdas;
    if (mean_loss) Eigen::Map<Eigen::VectorXd>(mean_loss, L) = cv->r.mean_loss;
    if (se_loss) Eigen::Map<Eigen::VectorXd>(se_loss, L) = cv->r.se_loss;
  });
}

double finreg_cv_selected(const finreg_cv* cv) { return cv ? cv->r.selected_lambda : 0; }
int finreg_cv_selected_index(const finreg_cv* cv) { return cv ? cv->r.selected_index : -1; }
long finreg_cv_failed_cells(const finreg_cv* cv) { return cv ? cv->r.n_failed_cells : 0; }

int finreg_cv_fold_of(const finreg_cv* cv, int i) {
  if (!cv || i < 0 || i >= static_cast<int>(cv->r.fold_assignments.size())) return -1;
  return cv->r.fold_assignments[i];
}

int finreg_fit_save(const finreg_model* m, const finreg_fit* f, const double* theta_override,
                    const char* path) {
  return guarded([&] {
    if (!m || !f || !path) throw std::invalid_argument("finreg_fit_save: bad arguments");
    SavedFit sf;
    sf.spec = make_predict_spec(m->m);
    sf.theta = theta_override ? Eigen::Map<const Eigen::VectorXd>(theta_override, m->m.d)
                              : f->r.theta;
    sf.labels = m->m.labels;
    const int p = static_cast<int>(m->m.inputs.X.cols());
    sf.predictor_names.assign(m->m.labels.end() - p, m->m.labels.end());
    sf.diagnostics = f->r;
    save_fit(path, sf);
  });
}

int finreg_fit_load(const char* path, finreg_saved** out) {
  return guarded([&] {
    if (!path || !out) throw std::invalid_argument("finreg_fit_load: bad arguments");
    *out = new finreg_saved{load_fit(path)};
  });
}

void finreg_saved_free(finreg_saved* s) { delete s; }
int finreg_saved_dim(const finreg_saved* s) { return s ? static_cast<int>(s->s.theta.size()) : 0; }
int finreg_saved_n_predictors(const finreg_saved* s) { return s ? s->s.spec.p : 0; }

int finreg_saved_n_cells(const finreg_saved* s) {
  if (!s) return 0;
  if (s->s.spec.cls == ModelClass::cumulative) return s->s.spec.n_categories;
  return static_cast<int>(s->s.spec.cuts.size()) + 1;
}

int finreg_saved_coef(const finreg_saved* s, double* out) {
  return guarded([&] {
    if (!s || !out) throw std::invalid_argument("finreg_saved_coef: bad arguments");
    Eigen::Map<Eigen::VectorXd>(out, s->s.theta.size()) = s->s.theta;
  });
}

int finreg_saved_predictor_name(const finreg_saved* s, int j, const char** out) {
  return guarded([&] {
    if (!s || !out || j < 0 || j >= static_cast<int>(s->s.predictor_names.size()))
      throw std::invalid_argument("bad predictor index");
    *out = s->s.predictor_names[j].c_str();
  });
}

int finreg_saved_predict(const finreg_saved* s, const double* x, double* probs) {
  return guarded([&] {
    if (!s || !probs || (s->s.spec.p > 0 && !x))
      throw std::invalid_argument("finreg_saved_predict: bad arguments");
    const Eigen::Map<const Eigen::VectorXd> xv(x, s->s.spec.p);
    const Eigen::VectorXd pr = predict_probs(s->s.spec, s->s.theta, xv);
    Eigen::Map<Eigen::VectorXd>(probs, pr.size()) = pr;
  });
}

int finreg_dataset_read(const char* path, finreg_dataset** out) {
  return guarded([&] {
    if (!path || !out) throw std::invalid_argument("finreg_dataset_read: bad arguments");
    *out = new finreg_dataset{parse_dataset(path)};
  });
}

void finreg_dataset_free(finreg_dataset* d) { delete d; }
int finreg_dataset_nobs(const finreg_dataset* d) { return d ? d->d.n : 0; }
int finreg_dataset_npred(const finreg_dataset* d) {
  return d ? static_cast<int>(d->d.X.cols()) : 0;
}
int finreg_dataset_has_category(const finreg_dataset* d) {
  return d && d->d.has_category ? 1 : 0;
}
int finreg_dataset_has_intervals(const finreg_dataset* d) {
  return d && d->d.has_intervals ? 1 : 0;
}

int finreg_dataset_predictors(const finreg_dataset* d, double* X) {
  return guarded([&] {
    if (!d || !X) throw std::invalid_argument("finreg_dataset_predictors: bad arguments");
    for (int i = 0; i < d->d.n; ++i)
      for (int j = 0; j < d->d.X.cols(); ++j)
        X[static_cast<size_t>(i) * d->d.X.cols() + j] = d->d.X(i, j);
  });
}

int finreg_dataset_bounds(const finreg_dataset* d, double* lower, double* upper) {
  return guarded([&] {
    if (!d || !lower || !upper) throw std::invalid_argument("finreg_dataset_bounds: bad arguments");
    if (!d->d.has_intervals) throw data_error("dataset has no lower/upper columns");
    for (int i = 0; i < d->d.n; ++i) {
      lower[i] = d->d.lower[i].as_double();
      upper[i] = d->d.upper[i].as_double();
    }
  });
}

int finreg_dataset_categories(const finreg_dataset* d, int* category) {
  return guarded([&] {
    if (!d || !category) throw std::invalid_argument("finreg_dataset_categories: bad arguments");
    if (!d->d.has_category) throw data_error("dataset has no category column");
    for (int i = 0; i < d->d.n; ++i) category[i] = d->d.category[i];
  });
}

int finreg_dataset_column_name(const finreg_dataset* d, int j, const char** out) {
  return guarded([&] {
    if (!d || !out || j < 0 || j >= static_cast<int>(d->d.column_names.size()))
      throw std::invalid_argument("bad column index");
    *out = d->d.column_names[j].c_str();
  });
}

void finreg_sim_config_default(finreg_sim_config* c) {
  if (!c) return;
  const SimConfig cfg;
  c->setting = 0;
  c->n = cfg.n;
  c->p = cfg.p;
  c->replications = cfg.replications;
  c->interval_size = cfg.interval_size;
  c->seed = cfg.seed;
  c->k_folds = cfg.k_folds;
  c->n_lambda = cfg.n_lambda;
  c->lambda_ratio = cfg.lambda_ratio;
  c->n_threads = cfg.n_threads;
}

int finreg_simulate(const finreg_sim_config* c, finreg_sim_report* out) {
  return guarded([&] {
    if (!c || !out) throw std::invalid_argument("finreg_simulate: bad arguments");
    const SimReport r = run_experiment(convert_sim_config(c));
    out->lik_sse = r.likelihood.sse_nonzero;
    out->lik_sse_se = r.likelihood.sse_se;
    out->lik_misclass = r.likelihood.mean_misclass;
    out->lik_misclass_se = r.likelihood.misclass_se;
    out->naive_sse = r.naive.sse_nonzero;
    out->naive_sse_se = r.naive.sse_se;
    out->naive_misclass = r.naive.mean_misclass;
    out->naive_misclass_se = r.naive.misclass_se;
    out->failed_replications = r.n_failed;
  });
}

int finreg_simulate_files(const finreg_sim_config* c, const char* json_path, const char* csv_path,
                          const char* tidy_path, finreg_sim_report* out) {
  return guarded([&] {
    if (!c) throw std::invalid_argument("finreg_simulate_files: bad arguments");
    const SimReport r = run_experiment(convert_sim_config(c));
    if (out) {
      out->lik_sse = r.likelihood.sse_nonzero;
      out->lik_sse_se = r.likelihood.sse_se;
      out->lik_misclass = r.likelihood.mean_misclass;
      out->lik_misclass_se = r.likelihood.misclass_se;
      out->naive_sse = r.naive.sse_nonzero;
      out->naive_sse_se = r.naive.sse_se;
      out->naive_misclass = r.naive.mean_misclass;
      out->naive_misclass_se = r.naive.misclass_se;
      out->failed_replications = r.n_failed;
    }
    const auto write = [](const char* path, const std::string& text) {
      if (!path) return;
      std::ofstream f(path);
      if (!f) throw data_error(std::string("cannot write file: ") + path);
      f << text;
    };
    write(json_path, sim_report_json(r) + "\n");
    write(csv_path, sim_report_csv(r));
    if (tidy_path) write(tidy_path, sim_report_tidy_header() + sim_report_tidy_rows(r));
  });
}

}  // extern "C"
