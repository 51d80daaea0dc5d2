// finreg command-line interface. Model building, fitting, cross-validation,
// prediction and the simulation study, all through the C API in finreg.h.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finreg.h"

namespace {

using json = nlohmann::json;

struct cli_error : std::runtime_error {
  int code;
  cli_error(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

void check(int rc) {
  if (rc != FINREG_OK) throw cli_error(rc, finreg_last_error());
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  ~Handle() {
    if (ptr) Free(ptr);
  }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using ModelHandle = Handle<finreg_model, finreg_model_free>;
using FitHandle = Handle<finreg_fit, finreg_fit_free>;
using TableHandle = Handle<finreg_table, finreg_table_free>;
using CvHandle = Handle<finreg_cv, finreg_cv_free>;
using SavedHandle = Handle<finreg_saved, finreg_saved_free>;
using DataHandle = Handle<finreg_dataset, finreg_dataset_free>;

struct LoadedData {
  int n = 0, p = 0;
  bool has_category = false, has_intervals = false;
  std::vector<double> X;  // row-major n x p
  std::vector<double> lower, upper;
  std::vector<int> category;
  std::vector<std::string> names;
};

LoadedData load_data(const std::string& path) {
  DataHandle d;
  check(finreg_dataset_read(path.c_str(), d.out()));
  LoadedData out;
  out.n = finreg_dataset_nobs(d.get());
  out.p = finreg_dataset_npred(d.get());
  out.has_category = finreg_dataset_has_category(d.get()) != 0;
  out.has_intervals = finreg_dataset_has_intervals(d.get()) != 0;
  out.X.resize(static_cast<size_t>(out.n) * out.p);
  if (out.p > 0) check(finreg_dataset_predictors(d.get(), out.X.data()));
  if (out.has_intervals) {
    out.lower.resize(out.n);
    out.upper.resize(out.n);
    check(finreg_dataset_bounds(d.get(), out.lower.data(), out.upper.data()));
  }
  if (out.has_category) {
    out.category.resize(out.n);
    check(finreg_dataset_categories(d.get(), out.category.data()));
  }
  for (int j = 0; j < out.p; ++j) {
    const char* name = nullptr;
    check(finreg_dataset_column_name(d.get(), j, &name));
    out.names.push_back(name);
  }
  return out;
}

struct ModelFlags {
  std::string data_path;
  std::string model = "interval";
  std::string family = "gaussian";
  std::string scale = "known";
  std::string basis = "exponential";
  int categories = 0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf) {
  cmd->add_option("--data", mf.data_path, "input CSV file")->required();
  cmd->add_option("--model", mf.model, "model class")
      ->check(CLI::IsMember({"interval", "cumulative", "survival"}));
  cmd->add_option("--family", mf.family, "latent family")
      ->check(CLI::IsMember({"gaussian", "logistic", "extreme-value"}));
  cmd->add_option("--scale", mf.scale, "interval-regression scale mode")
      ->check(CLI::IsMember({"known", "unknown"}));
  cmd->add_option("--basis", mf.basis, "survival basis")
      ->check(CLI::IsMember({"exponential", "weibull"}));
  cmd->add_option("--categories", mf.categories,
                  "number of categories (default: max of the category column)");
}

int family_code(const std::string& s) {
  if (s == "gaussian") return FINREG_FAMILY_GAUSSIAN;
  if (s == "logistic") return FINREG_FAMILY_LOGISTIC;
  return FINREG_FAMILY_EXTREME_VALUE;
}

// Scaling used by --standardize: divide each non-constant predictor column by
// its sample standard deviation. No centering, so models without an intercept
// column stay well-defined and the back-transform is exact.
std::vector<double> column_scales(const LoadedData& d) {
  std::vector<double> s(d.p, 1.0);
  for (int j = 0; j < d.p; ++j) {
    double mean = 0.0;
    for (int i = 0; i < d.n; ++i) mean += d.X[static_cast<size_t>(i) * d.p + j];
    mean /= d.n;
    double ss = 0.0;
    for (int i = 0; i < d.n; ++i) {
      const double c = d.X[static_cast<size_t>(i) * d.p + j] - mean;
      ss += c * c;
    }
    const double sd = d.n > 1 ? std::sqrt(ss / (d.n - 1)) : 0.0;
    s[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

void build_model(const ModelFlags& mf, const LoadedData& d, const std::vector<double>* scales,
                 ModelHandle& model) {
  std::vector<double> X = d.X;
  if (scales) {
    for (int i = 0; i < d.n; ++i)
      for (int j = 0; j < d.p; ++j) X[static_cast<size_t>(i) * d.p + j] /= (*scales)[j];
  }
  if (mf.model == "cumulative") {
    if (!d.has_category)
      throw cli_error(FINREG_ERR_DATA, "cumulative model needs a 'category' column");
    int m_cat = mf.categories;
    if (m_cat == 0)
      for (int c : d.category) m_cat = std::max(m_cat, c);
    check(finreg_model_cumulative(d.n, d.p, X.data(), d.category.data(), m_cat,
                                  family_code(mf.family), model.out()));
  } else if (mf.model == "survival") {
    if (!d.has_intervals)
      throw cli_error(FINREG_ERR_DATA, "survival model needs lower/upper columns");
    std::vector<double> lo(d.n);
    for (int i = 0; i < d.n; ++i)
      lo[i] = std::isinf(d.lower[i]) && d.lower[i] < 0 ? 0.0 : d.lower[i];
    const int basis = mf.basis == "weibull" ? FINREG_BASIS_WEIBULL : FINREG_BASIS_EXPONENTIAL;
    check(finreg_model_survival(d.n, d.p, X.data(), lo.data(), d.upper.data(), basis, 0, nullptr,
                                nullptr, model.out()));
  } else {
    if (!d.has_intervals)
      throw cli_error(FINREG_ERR_DATA, "interval model needs lower/upper columns");
    const int scale = mf.scale == "unknown" ? FINREG_SCALE_UNKNOWN : FINREG_SCALE_KNOWN;
    check(finreg_model_interval(d.n, d.p, X.data(), d.lower.data(), d.upper.data(), scale,
                                family_code(mf.family), model.out()));
  }
  if (d.p > 0) {
    std::vector<const char*> names(d.p);
    for (int j = 0; j < d.p; ++j) names[j] = d.names[j].c_str();
    check(finreg_model_set_predictor_names(model.get(), names.data(), d.p));
  }
}

std::string format_p(double p) {
  if (!std::isfinite(p)) return "NA";
  if (p < 1e-4) return "0";  // display rule for tiny p-values; JSON keeps full precision
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", p);
  return buf;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(path);
  if (!f) throw cli_error(FINREG_ERR_DATA, "cannot write file: " + path);
  f << content;
}

// ---------------------------------------------------------------- fit ----

int run_fit(const ModelFlags& mf, double lambda1, double lambda2, const std::string& standardize,
            double tol, int max_outer, bool use_fista, const std::string& out_path,
            const std::string& fit_file, bool json_only) {
  const LoadedData d = load_data(mf.data_path);
  const bool penalized = lambda1 > 0 || lambda2 > 0;
  const bool do_std = standardize == "on" || (standardize == "auto" && penalized);

  std::vector<double> scales;
  ModelHandle model;
  if (do_std) {
    scales = column_scales(d);
    build_model(mf, d, &scales, model);
  } else {
    build_model(mf, d, nullptr, model);
  }

  finreg_options opts;
  finreg_options_default(&opts);
  if (tol > 0) opts.tol = tol;
  if (max_outer > 0) opts.max_outer = max_outer;

  FitHandle fit;
  check(finreg_fit_run(model.get(), lambda1, lambda2, &opts, nullptr, use_fista ? 1 : 0,
                       fit.out()));

  const int dim = finreg_fit_dim(fit.get());
  std::vector<double> theta(dim);
  check(finreg_fit_coef(fit.get(), theta.data()));

  // transform back to the original predictor scale (last p coordinates)
  std::vector<double> theta_orig = theta;
  if (do_std)
    for (int j = 0; j < d.p; ++j) theta_orig[dim - d.p + j] /= scales[j];

  std::vector<std::string> labels(dim);
  for (int j = 0; j < dim; ++j) {
    const char* lab = nullptr;
    check(finreg_model_label(model.get(), j, &lab));
    labels[j] = lab;
  }

  int outer = 0;
  long inner = 0;
  finreg_fit_iters(fit.get(), &outer, &inner);

  json out;
  out["schema_version"] = 1;
  out["command"] = "fit";
  out["model"] = {{"class", mf.model}, {"family", mf.family},   {"scale", mf.scale},
                  {"basis", mf.basis}, {"n", d.n},              {"d", dim}};
  out["penalty"] = {{"lambda1", lambda1}, {"lambda2", lambda2}};
  out["standardized"] = do_std;
  out["diagnostics"] = {{"objective", finreg_fit_objective(fit.get())},
                        {"neg_loglik", finreg_fit_neg_loglik(fit.get())},
                        {"j_norm", finreg_fit_j_norm(fit.get())},
                        {"outer_iters", outer},
                        {"inner_iters", inner},
                        {"converged", finreg_fit_converged(fit.get()) != 0}};

  std::ostringstream text;
  char line[256];
  json coef = json::array();
  if (!penalized) {
    TableHandle table;
    check(finreg_wald_table(model.get(), fit.get(), table.out()));
    const bool ok = finreg_table_ok(table.get()) != 0;
    out["loglik"] = finreg_table_loglik(table.get());
    out["bic"] = finreg_table_bic(table.get());
    out["information_ok"] = ok;
    out["information_rank"] = finreg_table_rank(table.get());

    std::snprintf(line, sizeof line, "%16s %12s %12s %9s %9s\n", "coef", "estimate", "std.error",
                  "z", "p");
    text << line;
    for (int j = 0; j < dim; ++j) {
      double est = 0, se = 0, z = 0, p = 0;
      check(finreg_table_row(table.get(), j, &est, &se, &z, &p));
      const double sj = do_std && j >= dim - d.p ? scales[j - (dim - d.p)] : 1.0;
      json row = {{"name", labels[j]}, {"estimate", est / sj}};
      if (ok) {
        row["std_error"] = se / sj;
        row["z"] = z;
        row["p"] = p;
        std::snprintf(line, sizeof line, "%16s %12.5g %12.5g %9.3f %9s\n", labels[j].c_str(),
                      est / sj, se / sj, z, format_p(p).c_str());
      } else {
        std::snprintf(line, sizeof line, "%16s %12.5g %12s %9s %9s\n", labels[j].c_str(),
                      est / sj, "NA", "NA", "NA");
      }
      coef.push_back(row);
      text << line;
    }
    if (!ok)
      text << "warning: observed information is singular (rank "
           << finreg_table_rank(table.get()) << " of " << dim << "); no standard errors\n";
    std::snprintf(line, sizeof line, "loglik %.6f  bic %.6f\n", finreg_table_loglik(table.get()),
                  finreg_table_bic(table.get()));
    text << line;
  } else {
    text << "penalized fit (lambda1 " << lambda1 << ", lambda2 " << lambda2 << ")\n";
    std::snprintf(line, sizeof line, "%16s %12s\n", "coef", "estimate");
    text << line;
    int nonzero = 0;
    for (int j = 0; j < dim; ++j) {
      coef.push_back({{"name", labels[j]}, {"estimate", theta_orig[j]}});
      if (theta_orig[j] != 0.0) ++nonzero;
      std::snprintf(line, sizeof line, "%16s %12.5g\n", labels[j].c_str(), theta_orig[j]);
      text << line;
    }
    out["nonzero"] = nonzero;
    text << "nonzero " << nonzero << " of " << dim << "\n";
  }
  out["coefficients"] = coef;

  // derived latent-scale quantities for the unknown-scale model
  if (mf.model == "interval" && mf.scale == "unknown" && theta_orig[0] > 0) {
    json derived;
    derived["sigma"] = 1.0 / theta_orig[0];
    json beta = json::array();
    for (int j = 1; j < dim; ++j) beta.push_back(theta_orig[j] / theta_orig[0]);
    derived["beta"] = beta;
    out["derived"] = derived;
  }

  std::snprintf(line, sizeof line,
                "converged %s  objective %.10g  max|J| %.3g  outer %d  inner %ld\n",
                finreg_fit_converged(fit.get()) ? "yes" : "no", finreg_fit_objective(fit.get()),
                finreg_fit_j_norm(fit.get()), outer, inner);
  text << line;

  if (!fit_file.empty()) {
    ModelHandle raw_model;
    if (do_std) build_model(mf, d, nullptr, raw_model);
    finreg_model* save_model = do_std ? raw_model.get() : model.get();
    check(finreg_fit_save(save_model, fit.get(), do_std ? theta_orig.data() : nullptr,
                          fit_file.c_str()));
    text << "fit written to " << fit_file << "\n";
  }

  if (json_only) {
    write_output(out_path, out.dump(2) + "\n");
  } else {
    std::cout << text.str();
    if (!out_path.empty()) write_output(out_path, out.dump(2) + "\n");
  }
  if (finreg_fit_converged(fit.get()) == 0)
    throw cli_error(FINREG_ERR_NUMERIC, "solver did not converge");
  return 0;
}

// ----------------------------------------------------------------- cv ----

int run_cv(const ModelFlags& mf, double lambda2, int k_folds, int n_lambda, double lambda_ratio,
           const std::string& lambda_grid, std::uint64_t seed, int threads, double tol,
           const std::string& out_path, bool json_only) {
  const LoadedData d = load_data(mf.data_path);
  const std::vector<double> scales = column_scales(d);
  ModelHandle model;
  build_model(mf, d, &scales, model);  // cv implies penalties; standardized design

  std::vector<double> grid;
  if (!lambda_grid.empty()) {
    std::istringstream is(lambda_grid);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        grid.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw cli_error(1, "bad --lambda-grid entry: " + tok);
      }
    }
    std::sort(grid.begin(), grid.end(), std::greater<double>());
  } else {
    grid.resize(n_lambda);
    check(finreg_lambda_path(model.get(), n_lambda, lambda_ratio, grid.data()));
  }

  finreg_options opts;
  finreg_options_default(&opts);
  if (tol > 0) opts.tol = tol;

  CvHandle cv;
  check(finreg_cv_run(model.get(), lambda2, grid.data(), static_cast<int>(grid.size()), k_folds,
                      seed, &opts, threads, cv.out()));

  const int L = finreg_cv_size(cv.get());
  std::vector<double> lam(L), mean(L), se(L);
  check(finreg_cv_curve(cv.get(), lam.data(), mean.data(), se.data()));

  json out;
  out["schema_version"] = 1;
  out["command"] = "cv";
  out["model"] = {{"class", mf.model}, {"family", mf.family}, {"scale", mf.scale}};
  out["k_folds"] = k_folds;
  out["seed"] = seed;
  out["lambda2"] = lambda2;
  out["selected_lambda"] = finreg_cv_selected(cv.get());
  out["selected_index"] = finreg_cv_selected_index(cv.get());
  out["failed_cells"] = finreg_cv_failed_cells(cv.get());
  json curve = json::array();
  for (int l = 0; l < L; ++l)
    curve.push_back({{"lambda", lam[l]}, {"mean_loss", mean[l]}, {"se_loss", se[l]}});
  out["curve"] = curve;

  std::ostringstream text;
  char line[160];
  std::snprintf(line, sizeof line, "%14s %12s %12s\n", "lambda", "mean_loss", "se");
  text << line;
  for (int l = 0; l < L; ++l) {
    std::snprintf(line, sizeof line, "%14.6g %12.5f %12.5f%s\n", lam[l], mean[l], se[l],
                  l == finreg_cv_selected_index(cv.get()) ? "  <- selected" : "");
    text << line;
  }
  std::snprintf(line, sizeof line, "selected lambda %.6g (k=%d folds, seed %llu)\n",
                finreg_cv_selected(cv.get()), k_folds, static_cast<unsigned long long>(seed));
  text << line;

  if (json_only) {
    write_output(out_path, out.dump(2) + "\n");
  } else {
    std::cout << text.str();
    if (!out_path.empty()) write_output(out_path, out.dump(2) + "\n");
  }
  return 0;
}

// ------------------------------------------------------------- predict ----

int run_predict(const std::string& fit_path, const std::string& data_path,
                const std::string& out_path, bool json_only) {
  SavedHandle saved;
  check(finreg_fit_load(fit_path.c_str(), saved.out()));
  const int p = finreg_saved_n_predictors(saved.get());
  const int cells = finreg_saved_n_cells(saved.get());

  const LoadedData d = load_data(data_path);
  // match predictor columns by name; fall back to file order when compatible
  std::vector<int> col_of(p, -1);
  for (int j = 0; j < p; ++j) {
    const char* want = nullptr;
    check(finreg_saved_predictor_name(saved.get(), j, &want));
    for (int c = 0; c < d.p; ++c)
      if (d.names[c] == want) col_of[j] = c;
    if (col_of[j] < 0) {
      if (d.p == p)
        col_of[j] = j;
      else
        throw cli_error(FINREG_ERR_DATA,
                        std::string("prediction data is missing predictor column '") + want + "'");
    }
  }

  json rows = json::array();
  std::ostringstream text;
  std::vector<double> x(p), probs(cells);
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < p; ++j) x[j] = d.X[static_cast<size_t>(i) * d.p + col_of[j]];
    check(finreg_saved_predict(saved.get(), x.data(), probs.data()));
    json r = json::array();
    text << "row " << (i + 1) << ":";
    for (int c = 0; c < cells; ++c) {
      r.push_back(probs[c]);
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.5f", probs[c]);
      text << buf;
    }
    text << "\n";
    rows.push_back({{"probs", r}});
  }

  json out;
  out["schema_version"] = 1;
  out["command"] = "predict";
  out["n_cells"] = cells;
  out["rows"] = rows;

  if (json_only) {
    write_output(out_path, out.dump(2) + "\n");
  } else {
    std::cout << text.str();
    if (!out_path.empty()) write_output(out_path, out.dump(2) + "\n");
  }
  return 0;
}

// ------------------------------------------------------------ simulate ----

int run_simulate(const std::string& config_path, const std::string& out_dir) {
  std::ifstream f(config_path);
  if (!f) throw cli_error(FINREG_ERR_DATA, "cannot open config: " + config_path);
  json cfg_json;
  try {
    cfg_json = json::parse(f);
  } catch (const std::exception& e) {
    throw cli_error(FINREG_ERR_DATA, std::string("config is not valid JSON: ") + e.what());
  }

  finreg_sim_config cfg;
  finreg_sim_config_default(&cfg);
  const std::string setting = cfg_json.value("setting", std::string("extreme-value-lowdim"));
  cfg.setting = setting == "gaussian-highdim" || setting == "gaussian_highdim" ? 1 : 0;
  const char* name = cfg.setting == 1 ? "gaussian-highdim" : "extreme-value-lowdim";
  cfg.n = cfg_json.value("n", cfg.n);
  cfg.p = cfg_json.value("p", cfg.setting == 1 ? 200 : 3);
  cfg.replications = cfg_json.value("replications", cfg.replications);
  cfg.seed = cfg_json.value("seed", cfg.seed);
  cfg.k_folds = cfg_json.value("k_folds", cfg.k_folds);
  cfg.n_lambda = cfg_json.value("n_lambda", cfg.n_lambda);
  cfg.lambda_ratio = cfg_json.value("lambda_ratio", cfg.lambda_ratio);
  cfg.n_threads = cfg_json.value("threads", cfg.n_threads);

  std::vector<double> sizes;
  if (cfg_json.contains("interval_sizes"))
    sizes = cfg_json["interval_sizes"].get<std::vector<double>>();
  else
    sizes.push_back(cfg_json.value("interval_size", 1.0));

  const std::string dir = out_dir.empty() ? "." : out_dir;
  std::ostringstream tidy;
  tidy.precision(17);
  tidy << "setting,interval_size,method,metric,value,mc_se\n";

  for (double size : sizes) {
    cfg.interval_size = size;
    char tag[96];
    std::snprintf(tag, sizeof tag, "%s/sim_%s_d%g", dir.c_str(), name, size);
    finreg_sim_report rep;
    check(finreg_simulate_files(&cfg, (std::string(tag) + ".json").c_str(),
                                (std::string(tag) + ".csv").c_str(), nullptr, &rep));
    tidy << name << ',' << size << ",likelihood,sse_nonzero," << rep.lik_sse << ','
         << rep.lik_sse_se << '\n'
         << name << ',' << size << ",likelihood,mean_misclass," << rep.lik_misclass << ','
         << rep.lik_misclass_se << '\n'
         << name << ',' << size << ",naive,sse_nonzero," << rep.naive_sse << ','
         << rep.naive_sse_se << '\n'
         << name << ',' << size << ",naive,mean_misclass," << rep.naive_misclass << ','
         << rep.naive_misclass_se << '\n';
    std::printf("interval_size %-6g sse likelihood %.4f naive %.4f | misclass %.4f / %.4f%s\n",
                size, rep.lik_sse, rep.naive_sse, rep.lik_misclass, rep.naive_misclass,
                rep.failed_replications ? "  (failures!)" : "");
  }

  const std::string plot_path = dir + "/sim_plot_data.csv";
  std::ofstream plot(plot_path);
  if (!plot) throw cli_error(FINREG_ERR_DATA, "cannot write " + plot_path);
  plot << tidy.str();
  std::printf("plot data written to %s\n", plot_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finreg: likelihood-based regression for interval and ordinal responses"};
  app.require_subcommand(1);
  app.set_version_flag("--version", finreg_version());

  ModelFlags fit_mf, cv_mf;
  double lambda1 = 0.0, lambda2 = 0.0, cv_lambda2 = 0.0;
  std::string standardize = "auto";
  double tol = 0.0, cv_tol = 0.0;
  int max_outer = 0;
  bool use_fista = false, fit_json = false, cv_json = false, pred_json = false;
  std::string fit_out, fit_file, cv_out, pred_out;

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model");
  add_model_flags(fit_cmd, fit_mf);
  fit_cmd->add_option("--lambda1", lambda1, "L1 penalty");
  fit_cmd->add_option("--lambda2", lambda2, "ridge penalty");
  fit_cmd->add_option("--standardize", standardize, "scale predictors: auto|on|off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  fit_cmd->add_option("--tol", tol, "stationarity tolerance");
  fit_cmd->add_option("--max-outer", max_outer, "outer iteration cap");
  fit_cmd->add_flag("--fista", use_fista, "use the accelerated proximal-gradient solver");
  fit_cmd->add_option("--out", fit_out, "write JSON results here ('-' for stdout)");
  fit_cmd->add_option("--fit-file", fit_file, "save the fitted model for `predict`");
  fit_cmd->add_flag("--json", fit_json, "JSON output only");

  int k_folds = 5, n_lambda = 50, cv_threads = 0;
  double lambda_ratio = 1e-3;
  std::uint64_t seed = 1;
  std::string lambda_grid;
  CLI::App* cv_cmd = app.add_subcommand("cv", "select lambda1 by k-fold cross-validation");
  add_model_flags(cv_cmd, cv_mf);
  cv_cmd->add_option("--k-folds", k_folds, "number of folds");
  cv_cmd->add_option("--n-lambda", n_lambda, "grid size");
  cv_cmd->add_option("--lambda-ratio", lambda_ratio, "grid ratio lambda_min/lambda_max");
  cv_cmd->add_option("--lambda-grid", lambda_grid, "explicit comma-separated lambda grid");
  cv_cmd->add_option("--lambda2", cv_lambda2, "ridge penalty");
  cv_cmd->add_option("--seed", seed, "fold seed");
  cv_cmd->add_option("--threads", cv_threads, "fold workers (0 = auto)");
  cv_cmd->add_option("--tol", cv_tol, "stationarity tolerance");
  cv_cmd->add_option("--out", cv_out, "write JSON results here");
  cv_cmd->add_flag("--json", cv_json, "JSON output only");

  std::string pred_fit, pred_data;
  CLI::App* pred_cmd = app.add_subcommand("predict", "category probabilities for new data");
  pred_cmd->add_option("--fit-file", pred_fit, "saved fit from `fit --fit-file`")->required();
  pred_cmd->add_option("--data", pred_data, "CSV with predictor columns")->required();
  pred_cmd->add_option("--out", pred_out, "write JSON results here");
  pred_cmd->add_flag("--json", pred_json, "JSON output only");

  std::string sim_config, sim_out_dir;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run the censoring simulation study");
  sim_cmd->add_option("--config", sim_config, "JSON configuration")->required();
  sim_cmd->add_option("--out-dir", sim_out_dir, "output directory (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*fit_cmd)
      return run_fit(fit_mf, lambda1, lambda2, standardize, tol, max_outer, use_fista, fit_out,
                     fit_file, fit_json);
    if (*cv_cmd)
      return run_cv(cv_mf, cv_lambda2, k_folds, n_lambda, lambda_ratio, lambda_grid, seed,
                    cv_threads, cv_tol, cv_out, cv_json);
    if (*pred_cmd) return run_predict(pred_fit, pred_data, pred_out, pred_json);
    if (*sim_cmd) return run_simulate(sim_config, sim_out_dir);
  } catch (const cli_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return FINREG_ERR_NUMERIC;
  }
  return 1;
}
