#include <doctest.h>

#include <cmath>

#include "finreg/families.hpp"
#include "finreg/rng.hpp"
#include "test_util.hpp"

using namespace finreg;

namespace {

const Family kFamilies[] = {Family::gaussian, Family::logistic, Family::extreme_value};

IntervalEndpoints fin(double a, double b) {
  return {ExtReal::finite(a), ExtReal::finite(b)};
}

// Direct long-double evaluation of R(t2) - R(t1), independent of the
// log-domain production path.
long double direct_mass(Family f, long double t1, long double t2) {
  const auto R = [f](long double w) -> long double {
    switch (f) {
      case Family::gaussian: return erfcl(-w * 0.70710678118654752440L) / 2.0L;
      case Family::logistic: return 1.0L / (1.0L + expl(-w));
      case Family::extreme_value: return 1.0L - expl(-expl(w));
    }
    return 0.0L;
  };
  const auto S = [f](long double w) -> long double {
    switch (f) {
      case Family::gaussian: return erfcl(w * 0.70710678118654752440L) / 2.0L;
      case Family::logistic: return 1.0L / (1.0L + expl(w));
      case Family::extreme_value: return expl(-expl(w));
    }
    return 0.0L;
  };
  // difference anchored at the smaller tail mass so neither side rounds to 1
  if (S(t1) < R(t2)) return S(t1) - S(t2);
  return R(t2) - R(t1);
}

}  // namespace

TEST_CASE("family_eval at zero") {
  const auto lg = family_eval(Family::logistic, 0.0);
  CHECK(lg.cdf == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lg.pdf == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(lg.pdf_prime == doctest::Approx(0.0).epsilon(1e-15));

  const auto ga = family_eval(Family::gaussian, 0.0);
  CHECK(ga.pdf == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(ga.cdf == doctest::Approx(0.5).epsilon(1e-14));

  const auto ev = family_eval(Family::extreme_value, 0.0);
  CHECK(ev.cdf == doctest::Approx(0.6321205588285577).epsilon(1e-14));
  CHECK(ev.pdf_prime == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("family_eval stays inside (0,1) / (0,inf) in extreme tails") {
  for (Family f : kFamilies) {
    for (double w : {-700.0, -40.0, -8.0, 0.0, 8.0, 40.0, 700.0}) {
      const auto e = family_eval(f, w);
      CHECK(e.cdf > 0.0);
      CHECK(e.cdf < 1.0);
      CHECK(e.pdf > 0.0);
      CHECK(std::isfinite(e.pdf_prime));
      CHECK(std::isfinite(e.log_pdf));
    }
  }
}

TEST_CASE("log_interval_prob trivial endpoints") {
  for (Family f : kFamilies) {
    CHECK(log_interval_prob(f, {ExtReal::neg_inf(), ExtReal::pos_inf()}) == 0.0);
    CHECK(log_interval_prob(f, fin(1.0, 1.0)) == -std::numeric_limits<double>::infinity());
    CHECK(log_interval_prob(f, fin(2.0, -1.0)) == -std::numeric_limits<double>::infinity());
  }
  CHECK(log_interval_prob(Family::logistic, {ExtReal::finite(0.0), ExtReal::pos_inf()}) ==
        doctest::Approx(-0.6931471805599453).epsilon(1e-15));
}

TEST_CASE("log_interval_prob oracle values") {
  // high-precision reference values computed with 40-digit arithmetic
  CHECK(log_interval_prob(Family::gaussian, fin(-1.0, 1.0)) ==
        doctest::Approx(-0.38171514630212607).epsilon(1e-13));
  CHECK(log_interval_prob(Family::gaussian, fin(-40.0, -39.0)) ==
        doctest::Approx(-765.0831565643775).epsilon(1e-13));
  CHECK(log_interval_prob(Family::gaussian, fin(39.0, 40.0)) ==
        doctest::Approx(-765.0831565643775).epsilon(1e-13));
  CHECK(log_interval_prob(Family::logistic, fin(-35.0, -30.0)) ==
        doctest::Approx(-30.006760749449583).epsilon(1e-13));
  CHECK(log_interval_prob(Family::logistic, fin(30.0, 35.0)) ==
        doctest::Approx(-30.006760749449583).epsilon(1e-13));
  CHECK(log_interval_prob(Family::extreme_value, fin(-40.0, -39.0)) ==
        doctest::Approx(-39.45867514538708).epsilon(1e-13));
  CHECK(log_interval_prob(Family::extreme_value, fin(3.5, 4.0)) ==
        doctest::Approx(-33.115451959160246).epsilon(1e-13));
}

TEST_CASE("exp(psi) matches direct high-precision mass on random intervals") {
  rng::Rng gen(20240901);
  for (int it = 0; it < 1000; ++it) {
    const Family f = kFamilies[gen.uniform_int(3)];
    double t1 = -8.0 + 16.0 * gen.uniform();
    double t2 = -8.0 + 16.0 * gen.uniform();
    if (t1 > t2) std::swap(t1, t2);
    if (t2 - t1 < 0.01) t2 = t1 + 0.01;
    const double got = std::exp(log_interval_prob(f, fin(t1, t2)));
    const double want = static_cast<double>(direct_mass(f, t1, t2));
    CHECK(std::abs(got - want) <= 1e-12 * want);
  }
}

TEST_CASE("half-infinite intervals agree with cdf/survival") {
  rng::Rng gen(7);
  for (int it = 0; it < 200; ++it) {
    const Family f = kFamilies[gen.uniform_int(3)];
    const double t = -6.0 + 12.0 * gen.uniform();
    CHECK(log_interval_prob(f, {ExtReal::neg_inf(), ExtReal::finite(t)}) ==
          doctest::Approx(log_cdf(f, t)).epsilon(1e-15));
    CHECK(log_interval_prob(f, {ExtReal::finite(t), ExtReal::pos_inf()}) ==
          doctest::Approx(log_survival(f, t)).epsilon(1e-15));
  }
}

TEST_CASE("interval_grad_hess: logistic left-infinite example") {
  const auto d = interval_grad_hess(Family::logistic, {ExtReal::neg_inf(), ExtReal::finite(0.0)});
  CHECK(d.g1 == 0.0);
  CHECK(d.g2 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d.h11 == 0.0);
  CHECK(d.h12 == 0.0);
  CHECK(d.h22 == doctest::Approx(-0.25).epsilon(1e-14));
}

TEST_CASE("interval_grad_hess: gaussian symmetry") {
  for (double c : {0.3, 1.0, 2.5}) {
    const auto d = interval_grad_hess(Family::gaussian, fin(-c, c));
    CHECK(d.g1 == doctest::Approx(-d.g2).epsilon(1e-13));
    CHECK(d.h11 == doctest::Approx(d.h22).epsilon(1e-13));
  }
}

TEST_CASE("interval_grad_hess rejects empty intervals") {
  CHECK_THROWS_AS(interval_grad_hess(Family::gaussian, fin(1.0, 1.0)), std::domain_error);
  CHECK_THROWS_AS(interval_grad_hess(Family::logistic, fin(2.0, 0.0)), std::domain_error);
}

TEST_CASE("gradient and Hessian of psi match finite differences") {
  rng::Rng gen(99);
  const auto psi2 = [](Family f, const Eigen::VectorXd& t) {
    return log_interval_prob(f, {ExtReal::finite(t[0]), ExtReal::finite(t[1])});
  };
  int done = 0;
  for (int it = 0; done < 300 && it < 2000; ++it) {
    const Family f = kFamilies[gen.uniform_int(3)];
    double t1 = -5.0 + 10.0 * gen.uniform();
    double t2 = -5.0 + 10.0 * gen.uniform();
    if (t1 > t2) std::swap(t1, t2);
    if (t2 - t1 < 0.05) continue;
    ++done;
    Eigen::VectorXd t(2);
    t << t1, t2;
    const auto d = interval_grad_hess(f, fin(t1, t2));
    const Eigen::VectorXd g_fd =
        testutil::central_diff_grad([&](const Eigen::VectorXd& v) { return psi2(f, v); }, t, 1e-6);
    CHECK(testutil::close_rel(d.g1, g_fd[0], 1e-6));
    CHECK(testutil::close_rel(d.g2, g_fd[1], 1e-6));

    const Eigen::MatrixXd h_fd = testutil::central_diff_jac(
        [&](const Eigen::VectorXd& v) {
          const auto dv = interval_grad_hess(f, fin(v[0], v[1]));
          Eigen::VectorXd g(2);
          g << dv.g1, dv.g2;
          return g;
        },
        t, 1e-5);
    CHECK(testutil::close_rel(d.h11, h_fd(0, 0), 1e-5));
    CHECK(testutil::close_rel(d.h22, h_fd(1, 1), 1e-5));
    CHECK(testutil::close_rel(d.h12, 0.5 * (h_fd(0, 1) + h_fd(1, 0)), 1e-5));
  }
  CHECK(done == 300);
}

TEST_CASE("extreme-value H matches finite differences at (-0.3, 0.8)") {
  const auto d = interval_grad_hess(Family::extreme_value, fin(-0.3, 0.8));
  const Eigen::MatrixXd h_fd = testutil::central_diff_jac(
      [&](const Eigen::VectorXd& v) {
        const auto dv = interval_grad_hess(Family::extreme_value, fin(v[0], v[1]));
        Eigen::VectorXd g(2);
        g << dv.g1, dv.g2;
        return g;
      },
      (Eigen::VectorXd(2) << -0.3, 0.8).finished(), 1e-5);
  CHECK(testutil::close_rel(d.h11, h_fd(0, 0), 1e-6));
  CHECK(testutil::close_rel(d.h22, h_fd(1, 1), 1e-6));
  CHECK(testutil::close_rel(d.h12, h_fd(0, 1), 1e-6));
}

TEST_CASE("psi Hessian is negative semidefinite at feasible points") {
  rng::Rng gen(2211);
  for (int it = 0; it < 500; ++it) {
    const Family f = kFamilies[gen.uniform_int(3)];
    double t1 = -7.0 + 14.0 * gen.uniform();
    double t2 = t1 + 0.02 + 5.0 * gen.uniform();
    const auto d = interval_grad_hess(f, fin(t1, t2));
    Eigen::Matrix2d H;
    H << d.h11, d.h12, d.h12, d.h22;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
    CHECK(es.eigenvalues().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("psi is strictly concave along random segments") {
  rng::Rng gen(31337);
  for (int it = 0; it < 300; ++it) {
    const Family f = kFamilies[gen.uniform_int(3)];
    // two points in {t1 < t2}, kept well separated so strictness is visible
    double a1 = -4.0 + 8.0 * gen.uniform();
    double a2 = a1 + 0.1 + 3.0 * gen.uniform();
    double b1 = -4.0 + 8.0 * gen.uniform();
    double b2 = b1 + 0.1 + 3.0 * gen.uniform();
    if (std::abs(a1 - b1) + std::abs(a2 - b2) < 1e-3) continue;
    const double mid1 = 0.5 * (a1 + b1), mid2 = 0.5 * (a2 + b2);
    const double lhs = log_interval_prob(f, fin(mid1, mid2));
    const double rhs = 0.5 * log_interval_prob(f, fin(a1, a2)) +
                       0.5 * log_interval_prob(f, fin(b1, b2));
    CHECK(lhs - rhs > -1e-12);  // concavity with slack
    if (std::abs(a1 - b1) > 0.2 || std::abs(a2 - b2) > 0.2) CHECK(lhs > rhs);
  }
}
