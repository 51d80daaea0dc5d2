#include <doctest.h>

#include "finreg/cv.hpp"
#include "finreg/inference.hpp"
#include "test_util.hpp"

using namespace finreg;

namespace {

ModelData balanced_binary(int n) {
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = i % 2 == 0 ? 1 : 2;
  return build_cumulative(y, 2, Eigen::MatrixXd(n, 0), Family::logistic);
}

}  // namespace

TEST_CASE("observed information: intercept-only binary logistic") {
  const ModelData m = balanced_binary(100);
  const FitResult r = fit(m, m.penalty_default);
  REQUIRE(r.converged);
  CHECK(r.theta[0] == doctest::Approx(0.0).epsilon(1e-9));
  // Bernoulli information n p(1-p) = 25 at p = 1/2
  const Eigen::MatrixXd info = observed_information(m, r.theta);
  CHECK(info(0, 0) == doctest::Approx(25.0).epsilon(1e-8));
  const InferenceTable tab = wald_table(m, r);
  CHECK(tab.std_errors[0] == doctest::Approx(0.2).epsilon(1e-8));
}

TEST_CASE("observed information equals n times the average Hessian") {
  rng::Rng gen(42);
  const ModelData m = testutil::random_interval_model(gen, 30, 3, Family::extreme_value);
  const Eigen::VectorXd theta = testutil::random_feasible_theta(gen, m);
  CHECK(observed_information(m, theta).isApprox(m.n * neg_loglik_hess(m, theta), 1e-15));
}

TEST_CASE("normal and chi-square tail probabilities") {
  CHECK(2 * normal_sf(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(2 * normal_sf(1.959964) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(chisq_sf(11.0705, 5) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(chisq_sf(3.8415, 1) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(chisq_sf(0.0, 3) == 1.0);
}

TEST_CASE("wald_table basics and defaults") {
  rng::Rng gen(77);
  const ModelData m =
      testutil::random_interval_model(gen, 200, 2, Family::gaussian, ScaleMode::unknown);
  const FitResult r = fit(m, m.penalty_default);
  REQUIRE(r.converged);
  const InferenceTable tab = wald_table(m, r);
  REQUIRE(tab.info_ok);
  for (int j = 0; j < m.d; ++j) {
    CHECK(tab.std_errors[j] > 0.0);
    CHECK(tab.p_values[j] >= 0.0);
    CHECK(tab.p_values[j] <= 1.0);
  }
  // scale coordinate is tested against 1 by default
  CHECK(tab.z_values[0] ==
        doctest::Approx((r.theta[0] - 1.0) / tab.std_errors[0]).epsilon(1e-12));
  CHECK(tab.z_values[1] == doctest::Approx(r.theta[1] / tab.std_errors[1]).epsilon(1e-12));
  CHECK(tab.loglik == doctest::Approx(-r.neg_loglik).epsilon(1e-15));
}

TEST_CASE("wald_table refuses penalized fits") {
  rng::Rng gen(78);
  const ModelData m = testutil::random_interval_model(gen, 40, 2, Family::gaussian);
  PenaltySpec pen = m.penalty_default;
  pen.lambda1 = 0.05;
  const FitResult r = fit(m, pen);
  CHECK_THROWS_AS(wald_table(m, r), std::invalid_argument);
  CHECK_THROWS_AS(bic(r, m.n, m.d), std::invalid_argument);
}

TEST_CASE("wald_table surfaces singular information as a rank diagnostic") {
  // duplicated predictor column makes the information singular
  rng::Rng gen(79);
  Eigen::MatrixXd X(60, 2);
  for (int i = 0; i < 60; ++i) {
    X(i, 0) = gen.normal();
    X(i, 1) = X(i, 0);
  }
  std::vector<ExtReal> lo(60), hi(60);
  for (int i = 0; i < 60; ++i) {
    const double y = 0.4 * X(i, 0) + gen.normal();
    lo[i] = ExtReal::finite(std::floor(y));
    hi[i] = ExtReal::finite(std::floor(y) + 1.0);
  }
  const ModelData m = build_interval_regression(X, lo, hi, ScaleMode::known_one, Family::gaussian);
  SolverOptions opts;
  opts.max_outer = 50;
  const FitResult r = fit(m, m.penalty_default, opts);
  const InferenceTable tab = wald_table(m, r);
  CHECK_FALSE(tab.info_ok);
  CHECK(tab.info_rank == 1);
  CHECK(std::isnan(tab.std_errors[0]));
}

TEST_CASE("wald_table is equivariant under coordinate permutation") {
  rng::Rng gen(80);
  Eigen::MatrixXd X = testutil::random_matrix(gen, 150, 3);
  std::vector<ExtReal> lo(150), hi(150);
  for (int i = 0; i < 150; ++i) {
    const double y = 0.5 * X(i, 0) - 0.3 * X(i, 2) + gen.normal();
    lo[i] = ExtReal::finite(std::floor(y * 2) / 2);
    hi[i] = ExtReal::finite(std::floor(y * 2) / 2 + 0.5);
  }
  const auto m1 = build_interval_regression(X, lo, hi, ScaleMode::known_one, Family::gaussian);
  Eigen::MatrixXd Xp(150, 3);
  Xp.col(0) = X.col(2);
  Xp.col(1) = X.col(0);
  Xp.col(2) = X.col(1);
  const auto m2 = build_interval_regression(Xp, lo, hi, ScaleMode::known_one, Family::gaussian);
  const InferenceTable t1 = wald_table(m1, fit(m1, m1.penalty_default));
  const InferenceTable t2 = wald_table(m2, fit(m2, m2.penalty_default));
  const int perm[3] = {2, 0, 1};  // m2 column c equals m1 column perm[c]
  for (int c = 0; c < 3; ++c) {
    CHECK(t2.estimates[c] == doctest::Approx(t1.estimates[perm[c]]).epsilon(1e-7));
    CHECK(t2.std_errors[c] == doctest::Approx(t1.std_errors[perm[c]]).epsilon(1e-7));
  }
}

TEST_CASE("lrt") {
  rng::Rng gen(81);
  const ModelData m = testutil::random_interval_model(gen, 120, 3, Family::gaussian);
  const FitResult full = fit(m, m.penalty_default);

  SUBCASE("identical fits give stat 0, p 1") {
    const LrtResult r = lrt(full, full, 2);
    CHECK(r.stat == 0.0);
    CHECK(r.p == 1.0);
  }
  SUBCASE("nested submodel") {
    const ModelData sub = subset_columns(m, {0, 1});
    const FitResult small = fit(sub, sub.penalty_default);
    const LrtResult r = lrt(small, full, 1);
    CHECK(r.stat >= 0.0);
    CHECK(r.p >= 0.0);
    CHECK(r.p <= 1.0);
  }
  SUBCASE("nesting violation is an error") {
    const ModelData sub = subset_columns(m, {0, 1});
    const FitResult small = fit(sub, sub.penalty_default);
    CHECK_THROWS_AS(lrt(full, small, 1), std::invalid_argument);
  }
}

TEST_CASE("bic arithmetic") {
  FitResult r;
  r.neg_loglik = 50.0;  // loglik = -50
  CHECK(bic(r, 100, 2) == doctest::Approx(109.21034037197618).epsilon(1e-10));
  FitResult zero;
  CHECK(bic(zero, 100, 0) == 0.0);
}

TEST_CASE("bic comparison pipeline: censored latent regression vs saturated categories") {
  // latent log-scale intercept model observed in 13 bins, the censored-data
  // shape of a detection-limited biomarker
  rng::Rng gen(82);
  const int n = 400;
  std::vector<ExtReal> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    const double latent = std::exp(3.0 + 1.7 * gen.normal());
    int bin = static_cast<int>(std::floor(latent / 10.0));
    bin = std::min(bin, 12);
    lo[i] = bin == 0 ? ExtReal::neg_inf() : ExtReal::finite(std::log(10.0 * bin));
    hi[i] = bin == 12 ? ExtReal::pos_inf() : ExtReal::finite(std::log(10.0 * (bin + 1)));
  }
  for (int b = 0; b < 13; ++b) {  // make every bin occupied
    lo[b] = b == 0 ? ExtReal::neg_inf() : ExtReal::finite(std::log(10.0 * b));
    hi[b] = b == 12 ? ExtReal::pos_inf() : ExtReal::finite(std::log(10.0 * (b + 1)));
  }

  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, 1);
  const ModelData latent_model =
      build_interval_regression(ones, lo, hi, ScaleMode::unknown, Family::gaussian);
  const FitResult latent_fit = fit(latent_model, latent_model.penalty_default);
  REQUIRE(latent_fit.converged);

  // saturated categorical comparison needs the matching categories
  std::vector<int> cat2(n);
  for (int i = 0; i < n; ++i) {
    cat2[i] = lo[i].is_finite() ? static_cast<int>(std::lround(std::exp(lo[i].value) / 10.0)) + 1
                                : 1;
  }
  const ModelData cat_model = build_cumulative(cat2, 13, Eigen::MatrixXd(n, 0), Family::gaussian);
  const FitResult cat_fit = fit(cat_model, cat_model.penalty_default);
  REQUIRE(cat_fit.converged);

  const double bic_latent = bic(latent_fit, n, latent_model.d);
  const double bic_cat = bic(cat_fit, n, cat_model.d);
  CHECK(std::isfinite(bic_latent));
  CHECK(std::isfinite(bic_cat));
  // the categorical model is saturated, so its likelihood dominates
  CHECK(-cat_fit.neg_loglik >= -latent_fit.neg_loglik - 1e-8);
}

TEST_CASE("predict_probs") {
  SUBCASE("binary cumulative at theta = 0") {
    const ModelData m = balanced_binary(10);
    const PredictSpec spec = make_predict_spec(m);
    const Eigen::VectorXd probs =
        predict_probs(spec, Eigen::VectorXd::Zero(1), Eigen::VectorXd(0));
    REQUIRE(probs.size() == 2);
    CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("probabilities sum to one for random theta and x") {
    rng::Rng gen(83);
    const ModelData m = testutil::random_cumulative_model(gen, 40, 5, 2, Family::logistic);
    const PredictSpec spec = make_predict_spec(m);
    for (int it = 0; it < 25; ++it) {
      const Eigen::VectorXd theta = testutil::random_feasible_theta(gen, m);
      const Eigen::VectorXd x = (Eigen::VectorXd(2) << gen.normal(), gen.normal()).finished();
      const Eigen::VectorXd probs = predict_probs(spec, theta, x);
      CHECK(probs.minCoeff() >= 0.0);
      CHECK(probs.sum() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("interval-regression grid from training cuts") {
    rng::Rng gen(84);
    const ModelData m = testutil::random_interval_model(gen, 50, 2, Family::gaussian);
    const PredictSpec spec = make_predict_spec(m);
    REQUIRE(spec.cuts.size() >= 2);
    const Eigen::VectorXd x = (Eigen::VectorXd(2) << 0.3, -0.2).finished();
    const Eigen::VectorXd probs = predict_probs(spec, Eigen::VectorXd::Zero(2), x);
    CHECK(probs.sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("no-predictor cumulative MLE reproduces sample proportions") {
  rng::Rng gen(85);
  for (Family fam : {Family::gaussian, Family::logistic, Family::extreme_value}) {
    const int n = 300, m_cat = 5;
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) y[i] = 1 + gen.uniform_int(m_cat);
    for (int c = 1; c <= m_cat; ++c) y[c - 1] = c;
    Eigen::VectorXd freq = Eigen::VectorXd::Zero(m_cat);
    for (int v : y) freq[v - 1] += 1.0 / n;

    const ModelData m = build_cumulative(y, m_cat, Eigen::MatrixXd(n, 0), fam);
    const FitResult r = fit(m, m.penalty_default);
    REQUIRE(r.converged);
    const Eigen::VectorXd probs = predict_probs(make_predict_spec(m), r.theta, Eigen::VectorXd(0));
    for (int c = 0; c < m_cat; ++c) CHECK(std::abs(probs[c] - freq[c]) <= 1e-6);
  }
}
