#include <doctest.h>

#include "finreg/model.hpp"
#include "finreg/objective.hpp"
#include "test_util.hpp"

using namespace finreg;

namespace {
Eigen::MatrixXd row12() {
  Eigen::MatrixXd X(1, 2);
  X << 1.0, 2.0;
  return X;
}
}  // namespace

TEST_CASE("interval regression blocks, known scale") {
  const auto m = build_interval_regression(row12(), {ExtReal::finite(0.0)}, {ExtReal::pos_inf()},
                                           ScaleMode::known_one, Family::gaussian);
  CHECK(m.d == 2);
  const auto b = m.block(0);
  CHECK(b.z_a[0] == -1.0);
  CHECK(b.z_a[1] == -2.0);
  CHECK(b.m_a.value == 0.0);
  CHECK(b.b_infinite);
  CHECK(b.z_b.isZero());
}

TEST_CASE("interval regression blocks, unknown scale") {
  SUBCASE("left-infinite row zeroes the whole a-row") {
    const auto m = build_interval_regression(row12(), {ExtReal::neg_inf()}, {ExtReal::finite(0.0)},
                                             ScaleMode::unknown, Family::gaussian);
    CHECK(m.d == 3);
    const auto b = m.block(0);
    CHECK(b.a_infinite);
    CHECK(b.z_a.isZero());
    CHECK(b.z_b[0] == 0.0);
    CHECK(b.z_b[1] == -1.0);
    CHECK(b.z_b[2] == -2.0);
    CHECK(b.m_b.value == 0.0);
  }
  SUBCASE("both endpoints finite carry the cuts in the first coordinate") {
    const auto m = build_interval_regression(row12(), {ExtReal::finite(1.0)}, {ExtReal::finite(3.0)},
                                             ScaleMode::unknown, Family::gaussian);
    const auto b = m.block(0);
    CHECK(b.z_a[0] == 1.0);
    CHECK(b.z_a[1] == -1.0);
    CHECK(b.z_a[2] == -2.0);
    CHECK(b.z_b[0] == 3.0);
    CHECK(b.m_a.value == 0.0);
    CHECK(b.m_b.value == 0.0);
    CHECK(m.penalty_default.lower_bound[0] == 0.0);
    CHECK(m.penalty_default.l1_weight[0] == 0.0);
    CHECK(m.roles[0] == ParamRole::scale);
  }
}

TEST_CASE("interval regression rejects bad input") {
  CHECK_THROWS_AS(build_interval_regression(row12(), {ExtReal::finite(1.0)},
                                            {ExtReal::finite(1.0)}, ScaleMode::known_one,
                                            Family::gaussian),
                  data_error);
  CHECK_THROWS_AS(build_interval_regression(row12(), {ExtReal::finite(2.0), ExtReal::finite(0.0)},
                                            {ExtReal::finite(3.0), ExtReal::finite(1.0)},
                                            ScaleMode::known_one, Family::gaussian),
                  data_error);
}

TEST_CASE("cumulative blocks") {
  const Eigen::MatrixXd X0(3, 0);
  const auto m = build_cumulative({2, 1, 3}, 3, X0, Family::logistic);
  CHECK(m.d == 2);
  const auto b0 = m.block(0);  // y = 2: a = theta_1, b = theta_2
  CHECK(b0.z_a[0] == 1.0);
  CHECK(b0.z_a[1] == 0.0);
  CHECK(b0.z_b[1] == 1.0);
  const auto b1 = m.block(1);  // y = 1: a infinite, b = theta_1
  CHECK(b1.a_infinite);
  CHECK(b1.z_b[0] == 1.0);
  const auto b2 = m.block(2);  // y = 3: b infinite
  CHECK(b2.b_infinite);
  CHECK(b2.z_a[1] == 1.0);
  CHECK(m.penalty_default.l1_weight[0] == 0.0);
  CHECK(m.roles[0] == ParamRole::cutpoint);

  CHECK_THROWS_AS(build_cumulative({1, 4}, 3, Eigen::MatrixXd(2, 0), Family::logistic), data_error);
}

TEST_CASE("binary cumulative specialization") {
  const auto m = build_cumulative({1, 2, 2, 1}, 2, Eigen::MatrixXd(4, 0), Family::logistic);
  CHECK(m.d == 1);
  Eigen::VectorXd theta(1);
  theta << 0.0;
  // f(1) = R(theta_1) = 0.5 at theta_1 = 0
  CHECK(neg_loglik(m, theta) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("survival blocks") {
  Eigen::MatrixXd X(1, 1);
  X << 1.0;
  SUBCASE("exponential") {
    SurvivalBasis basis;
    const auto m = build_survival({3.0}, {ExtReal::finite(6.0)}, X, basis);
    CHECK(m.family == Family::extreme_value);
    const auto b = m.block(0);
    CHECK(b.z_a[0] == -1.0);
    CHECK(b.m_a.value == doctest::Approx(std::log(3.0)));
    CHECK(b.z_b[0] == -1.0);
    CHECK(b.m_b.value == doctest::Approx(std::log(6.0)));
  }
  SUBCASE("zero lower cut is left-infinite") {
    SurvivalBasis basis;
    basis.kind = SurvivalBasisKind::weibull;
    const auto m = build_survival({0.0}, {ExtReal::finite(2.0)}, X, basis);
    CHECK(m.block(0).a_infinite);
    CHECK(m.block(0).z_a.isZero());
  }
  SUBCASE("weibull right-censored") {
    SurvivalBasis basis;
    basis.kind = SurvivalBasisKind::weibull;
    const auto m = build_survival({3.0}, {ExtReal::pos_inf()}, X, basis);
    const auto b = m.block(0);
    CHECK(b.z_a[0] == doctest::Approx(std::log(3.0)));
    CHECK(b.z_a[1] == -1.0);
    CHECK(b.b_infinite);
    CHECK(m.penalty_default.lower_bound[0] == 0.0);
    CHECK(m.theta_init[0] == 1.0);
  }
  SUBCASE("errors") {
    SurvivalBasis basis;
    CHECK_THROWS_AS(build_survival({-1.0}, {ExtReal::finite(2.0)}, X, basis), data_error);
    CHECK_THROWS_AS(build_survival({0.0}, {ExtReal::finite(0.0)}, X, basis), data_error);
  }
}

TEST_CASE("blocks normalize: exhaustive partition sums to one") {
  rng::Rng gen(5150);
  const Family fams[] = {Family::gaussian, Family::logistic, Family::extreme_value};
  for (Family fam : fams) {
    // one subject observed in every bin of a grid partitioning the line
    const std::vector<double> cuts = {-1.5, -0.25, 0.4, 2.0};
    const int k = static_cast<int>(cuts.size());
    Eigen::MatrixXd X(k + 1, 2);
    std::vector<ExtReal> lo(k + 1), hi(k + 1);
    Eigen::Vector2d x(0.7, -0.3);
    for (int j = 0; j <= k; ++j) {
      X.row(j) = x.transpose();
      lo[j] = j == 0 ? ExtReal::neg_inf() : ExtReal::finite(cuts[j - 1]);
      hi[j] = j == k ? ExtReal::pos_inf() : ExtReal::finite(cuts[j]);
    }
    const auto m = build_interval_regression(X, lo, hi, ScaleMode::known_one, fam);
    for (int rep = 0; rep < 20; ++rep) {
      Eigen::VectorXd theta(2);
      theta << gen.normal(), gen.normal();
      const EtaCache eta = linear_predictors(m, theta);
      double total = 0.0;
      for (int i = 0; i < m.n; ++i) {
        IntervalEndpoints e;
        e.lower = m.a_inf[i] ? ExtReal::neg_inf() : ExtReal::finite(eta.a[i]);
        e.upper = m.b_inf[i] ? ExtReal::pos_inf() : ExtReal::finite(eta.b[i]);
        total += std::exp(log_interval_prob(fam, e));
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("known-scale blocks share z rows when both endpoints are finite") {
  rng::Rng gen(808);
  const auto m = testutil::random_interval_model(gen, 40, 3, Family::gaussian);
  for (int i = 0; i < m.n; ++i) {
    if (!m.a_inf[i] && !m.b_inf[i]) CHECK((m.Za.row(i) - m.Zb.row(i)).isZero());
  }
}

TEST_CASE("cumulative categories tile the line") {
  rng::Rng gen(111);
  Eigen::MatrixXd X(5, 2);
  for (int i = 0; i < 5; ++i) X.row(i) << gen.normal(), gen.normal();
  const int m_cat = 4;
  // same subject in all categories: b-endpoint of category j equals
  // a-endpoint of category j+1 for every theta
  Eigen::MatrixXd Xr(m_cat, 2);
  std::vector<int> y(m_cat);
  for (int j = 0; j < m_cat; ++j) {
    Xr.row(j) = X.row(2);
    y[j] = j + 1;
  }
  const auto m = build_cumulative(y, m_cat, Xr, Family::gaussian);
  Eigen::VectorXd theta(m.d);
  theta << -1.0, 0.2, 1.1, 0.4, -0.6;
  const EtaCache eta = linear_predictors(m, theta);
  for (int j = 0; j + 1 < m_cat; ++j) CHECK(eta.b[j] == doctest::Approx(eta.a[j + 1]).epsilon(1e-15));
}

TEST_CASE("subset_observations rebuilds identical blocks") {
  rng::Rng gen(99);
  const auto m = testutil::random_interval_model(gen, 30, 3, Family::logistic, ScaleMode::unknown);
  const std::vector<int> idx = {3, 7, 11, 29};
  const auto s = subset_observations(m, idx);
  CHECK(s.n == 4);
  CHECK(s.d == m.d);
  for (int r = 0; r < 4; ++r) {
    CHECK((s.Za.row(r) - m.Za.row(idx[r])).isZero());
    CHECK((s.Zb.row(r) - m.Zb.row(idx[r])).isZero());
    CHECK(s.a_inf[r] == m.a_inf[idx[r]]);
  }
}
