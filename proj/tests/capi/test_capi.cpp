// Exercises the shared-library C interface end to end: model handles, fits,
// inference, cross-validation, saved fits, datasets, simulation, error paths.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "finreg.h"

namespace {

const double kInf = std::numeric_limits<double>::infinity();

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content = "") {
    path = std::string("/tmp/finreg_capi_") + std::to_string(getpid()) + "_" + name;
    if (!content.empty()) {
      std::ofstream f(path);
      f << content;
    }
  }
  ~TempFile() { std::remove(path.c_str()); }
};

// small deterministic binary design
struct Design {
  int n = 120, p = 2;
  std::vector<double> X, lower, upper;
  Design() {
    unsigned state = 12345;
    auto next = [&] {
      state = state * 1103515245u + 12345u;
      return (state >> 16) / 32768.0 - 1.0;
    };
    for (int i = 0; i < n; ++i) {
      const double x1 = next(), x2 = next();
      X.push_back(x1);
      X.push_back(x2);
      const double y = 0.8 * x1 - 0.5 * x2 + next();
      const double a = std::floor(y * 2) / 2;
      lower.push_back(a);
      upper.push_back(a + 0.5);
    }
  }
};

}  // namespace

TEST_CASE("version and error text") {
  CHECK(std::string(finreg_version()) == "0.1.0");
  finreg_model* out = nullptr;
  CHECK(finreg_model_interval(0, 0, nullptr, nullptr, nullptr, 0, 0, &out) ==
        FINREG_ERR_INVALID);
  CHECK(std::string(finreg_last_error()).size() > 0);
}

TEST_CASE("interval model lifecycle: fit, wald, save, predict") {
  Design d;
  finreg_model* model = nullptr;
  REQUIRE(finreg_model_interval(d.n, d.p, d.X.data(), d.lower.data(), d.upper.data(),
                                FINREG_SCALE_KNOWN, FINREG_FAMILY_GAUSSIAN,
                                &model) == FINREG_OK);
  CHECK(finreg_model_dim(model) == 2);
  CHECK(finreg_model_nobs(model) == d.n);
  CHECK(finreg_model_role(model, 0) == FINREG_ROLE_COEFFICIENT);

  const char* names[2] = {"age", "dose"};
  REQUIRE(finreg_model_set_predictor_names(model, names, 2) == FINREG_OK);
  const char* lab = nullptr;
  REQUIRE(finreg_model_label(model, 1, &lab) == FINREG_OK);
  CHECK(std::string(lab) == "dose");

  finreg_fit* fit = nullptr;
  REQUIRE(finreg_fit_run(model, 0.0, 0.0, nullptr, nullptr, 0, &fit) == FINREG_OK);
  CHECK(finreg_fit_converged(fit) == 1);
  CHECK(finreg_fit_j_norm(fit) <= 1e-8);
  std::vector<double> coef(2);
  REQUIRE(finreg_fit_coef(fit, coef.data()) == FINREG_OK);
  CHECK(std::isfinite(coef[0]));

  finreg_table* table = nullptr;
  REQUIRE(finreg_wald_table(model, fit, &table) == FINREG_OK);
  CHECK(finreg_table_ok(table) == 1);
  double est = 0, se = 0, z = 0, p = 0;
  REQUIRE(finreg_table_row(table, 0, &est, &se, &z, &p) == FINREG_OK);
  CHECK(se > 0);
  CHECK(p >= 0);
  CHECK(p <= 1);
  CHECK(std::isfinite(finreg_table_bic(table)));

  TempFile fit_file("fit.json");
  REQUIRE(finreg_fit_save(model, fit, nullptr, fit_file.path.c_str()) == FINREG_OK);
  finreg_saved* saved = nullptr;
  REQUIRE(finreg_fit_load(fit_file.path.c_str(), &saved) == FINREG_OK);
  CHECK(finreg_saved_dim(saved) == 2);
  CHECK(finreg_saved_n_predictors(saved) == 2);
  const int cells = finreg_saved_n_cells(saved);
  CHECK(cells >= 3);
  std::vector<double> probs(cells);
  const double x[2] = {0.2, -0.4};
  REQUIRE(finreg_saved_predict(saved, x, probs.data()) == FINREG_OK);
  double total = 0;
  for (double v : probs) {
    CHECK(v >= 0.0);
    total += v;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  const char* pname = nullptr;
  REQUIRE(finreg_saved_predictor_name(saved, 0, &pname) == FINREG_OK);
  CHECK(std::string(pname) == "age");

  finreg_saved_free(saved);
  finreg_table_free(table);
  finreg_fit_free(fit);
  finreg_model_free(model);
}

TEST_CASE("penalized fit refuses inference, cv selects a lambda") {
  Design d;
  finreg_model* model = nullptr;
  REQUIRE(finreg_model_interval(d.n, d.p, d.X.data(), d.lower.data(), d.upper.data(),
                                FINREG_SCALE_KNOWN, FINREG_FAMILY_GAUSSIAN,
                                &model) == FINREG_OK);

  double lmax = 0;
  REQUIRE(finreg_lambda_max(model, &lmax) == FINREG_OK);
  CHECK(lmax > 0);
  std::vector<double> grid(6);
  REQUIRE(finreg_lambda_path(model, 6, 0.01, grid.data()) == FINREG_OK);
  CHECK(grid[0] == doctest::Approx(lmax));

  finreg_fit* pen_fit = nullptr;
  REQUIRE(finreg_fit_run(model, grid[2], 0.0, nullptr, nullptr, 0, &pen_fit) == FINREG_OK);
  finreg_table* table = nullptr;
  CHECK(finreg_wald_table(model, pen_fit, &table) == FINREG_ERR_INVALID);
  double b = 0;
  CHECK(finreg_bic(pen_fit, d.n, 2, &b) == FINREG_ERR_INVALID);

  finreg_cv* cv = nullptr;
  REQUIRE(finreg_cv_run(model, 0.0, grid.data(), 6, 4, 11, nullptr, 2, &cv) == FINREG_OK);
  CHECK(finreg_cv_size(cv) == 6);
  CHECK(finreg_cv_selected(cv) > 0);
  CHECK(finreg_cv_selected_index(cv) >= 0);
  CHECK(finreg_cv_fold_of(cv, 0) >= 0);

  // determinism through the C surface
  finreg_cv* cv2 = nullptr;
  REQUIRE(finreg_cv_run(model, 0.0, grid.data(), 6, 4, 11, nullptr, 1, &cv2) == FINREG_OK);
  CHECK(finreg_cv_selected(cv2) == finreg_cv_selected(cv));
  std::vector<double> m1(6), m2(6);
  REQUIRE(finreg_cv_curve(cv, nullptr, m1.data(), nullptr) == FINREG_OK);
  REQUIRE(finreg_cv_curve(cv2, nullptr, m2.data(), nullptr) == FINREG_OK);
  CHECK(m1 == m2);

  finreg_cv_free(cv2);
  finreg_cv_free(cv);
  finreg_fit_free(pen_fit);
  finreg_model_free(model);
}

TEST_CASE("fista route through the C interface") {
  Design d;
  finreg_model* model = nullptr;
  REQUIRE(finreg_model_interval(d.n, d.p, d.X.data(), d.lower.data(), d.upper.data(),
                                FINREG_SCALE_KNOWN, FINREG_FAMILY_LOGISTIC,
                                &model) == FINREG_OK);
  finreg_fit *a = nullptr, *b = nullptr;
  REQUIRE(finreg_fit_run(model, 0.02, 0.0, nullptr, nullptr, 0, &a) == FINREG_OK);
  REQUIRE(finreg_fit_run(model, 0.02, 0.0, nullptr, nullptr, 1, &b) == FINREG_OK);
  CHECK(std::abs(finreg_fit_objective(a) - finreg_fit_objective(b)) <= 1e-6);
  finreg_fit_free(a);
  finreg_fit_free(b);
  finreg_model_free(model);
}

TEST_CASE("cumulative and survival models through the C interface") {
  const int n = 40;
  std::vector<int> cat(n);
  for (int i = 0; i < n; ++i) cat[i] = 1 + i % 3;
  finreg_model* cm = nullptr;
  REQUIRE(finreg_model_cumulative(n, 0, nullptr, cat.data(), 3, FINREG_FAMILY_LOGISTIC, &cm) ==
          FINREG_OK);
  CHECK(finreg_model_dim(cm) == 2);
  CHECK(finreg_model_role(cm, 0) == FINREG_ROLE_CUTPOINT);
  finreg_fit* cf = nullptr;
  REQUIRE(finreg_fit_run(cm, 0, 0, nullptr, nullptr, 0, &cf) == FINREG_OK);
  CHECK(finreg_fit_converged(cf) == 1);
  finreg_fit_free(cf);
  finreg_model_free(cm);

  std::vector<double> X(n, 1.0), lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    lo[i] = 0.5 * (i % 5);
    hi[i] = i % 7 == 0 ? kInf : lo[i] + 0.5;
  }
  finreg_model* sm = nullptr;
  REQUIRE(finreg_model_survival(n, 1, X.data(), lo.data(), hi.data(), FINREG_BASIS_WEIBULL, 0,
                                nullptr, nullptr, &sm) == FINREG_OK);
  CHECK(finreg_model_dim(sm) == 2);
  CHECK(finreg_model_role(sm, 0) == FINREG_ROLE_SCALE);
  finreg_fit* sf = nullptr;
  REQUIRE(finreg_fit_run(sm, 0, 0, nullptr, nullptr, 0, &sf) == FINREG_OK);
  std::vector<double> coef(2);
  finreg_fit_coef(sf, coef.data());
  CHECK(coef[0] >= 0.0);  // shape bounded below at zero
  finreg_fit_free(sf);
  finreg_model_free(sm);
}

TEST_CASE("dataset reading and error classes") {
  TempFile good("ok.csv", "lower,upper,x1\n0,1,0.5\n1,inf,-0.25\n,0,1.0\n");
  finreg_dataset* ds = nullptr;
  REQUIRE(finreg_dataset_read(good.path.c_str(), &ds) == FINREG_OK);
  CHECK(finreg_dataset_nobs(ds) == 3);
  CHECK(finreg_dataset_npred(ds) == 1);
  CHECK(finreg_dataset_has_intervals(ds) == 1);
  std::vector<double> lo(3), hi(3);
  REQUIRE(finreg_dataset_bounds(ds, lo.data(), hi.data()) == FINREG_OK);
  CHECK(hi[1] == kInf);
  CHECK(lo[2] == -kInf);
  const char* name = nullptr;
  REQUIRE(finreg_dataset_column_name(ds, 0, &name) == FINREG_OK);
  CHECK(std::string(name) == "x1");
  finreg_dataset_free(ds);

  TempFile bad("bad.csv", "lower,upper\n3,2\n");
  finreg_dataset* ds2 = nullptr;
  CHECK(finreg_dataset_read(bad.path.c_str(), &ds2) == FINREG_ERR_DATA);
  CHECK(std::string(finreg_last_error()).find("row 2") != std::string::npos);
  CHECK(finreg_dataset_read("/nonexistent/file.csv", &ds2) == FINREG_ERR_DATA);
}

TEST_CASE("simulation through the C interface") {
  finreg_sim_config cfg;
  finreg_sim_config_default(&cfg);
  cfg.setting = 0;
  cfg.n = 50;
  cfg.p = 3;
  cfg.replications = 2;
  cfg.interval_size = 1.0;
  cfg.seed = 4;
  finreg_sim_report rep;
  REQUIRE(finreg_simulate(&cfg, &rep) == FINREG_OK);
  CHECK(rep.failed_replications == 0);
  CHECK(rep.lik_sse >= 0);

  TempFile js("sim.json"), cs("sim.csv"), td("sim_tidy.csv");
  finreg_sim_report rep2;
  REQUIRE(finreg_simulate_files(&cfg, js.path.c_str(), cs.path.c_str(), td.path.c_str(), &rep2) ==
          FINREG_OK);
  CHECK(rep2.lik_sse == rep.lik_sse);  // deterministic
  std::ifstream f(js.path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(text.find("sse_nonzero") != std::string::npos);
}

TEST_CASE("numerical failures are classified") {
  // inverted cutpoints as a start point: infeasible
  const int n = 6;
  std::vector<int> cat = {1, 2, 3, 1, 2, 3};
  finreg_model* cm = nullptr;
  REQUIRE(finreg_model_cumulative(n, 0, nullptr, cat.data(), 3, FINREG_FAMILY_GAUSSIAN, &cm) ==
          FINREG_OK);
  const double bad_start[2] = {1.0, 0.5};
  finreg_fit* f = nullptr;
  CHECK(finreg_fit_run(cm, 0, 0, nullptr, bad_start, 0, &f) == FINREG_ERR_NUMERIC);
  finreg_model_free(cm);
}
