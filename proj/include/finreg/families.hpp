#pragma once

#include "finreg/types.hpp"

namespace finreg {

/// The three built-in log-concave latent families. Each is strictly positive,
/// strictly log-concave and continuously differentiable on the real line,
/// which is what makes the interval log-likelihood concave.
enum class Family : int {
  gaussian = 0,      // probit-type link
  logistic = 1,      // logit-type link
  extreme_value = 2  // complementary log-log type, R(w) = 1 - exp(-exp(w))
};

Family family_from_string(const std::string& s);
const char* family_name(Family f);

struct FamilyEval {
  double cdf;        // R(w)
  double pdf;        // r(w)
  double pdf_prime;  // r'(w)
  double log_pdf;    // log r(w)
};

/// Pointwise evaluation of R, r, r' at a finite argument. CDF and density are
/// clamped away from exact 0/1 so downstream logs stay finite.
FamilyEval family_eval(Family f, double w);

/// log R(w), accurate in the far left tail.
double log_cdf(Family f, double w);

/// log{1 - R(w)}, accurate in the far right tail.
double log_survival(Family f, double w);

/// r'(w) / r(w); finite everywhere.
double log_density_slope(Family f, double w);

struct IntervalEndpoints {
  ExtReal lower;  // t1
  ExtReal upper;  // t2
};

/// psi(t1, t2) = log{R(t2) - R(t1)} computed tail-stably.
///   (-inf, +inf) -> 0;   t2 <= t1 -> -inf (in-band infeasibility signal).
double log_interval_prob(Family f, const IntervalEndpoints& e);

/// Gradient and Hessian of psi with the convention that an infinite endpoint
/// zeroes its element of g and its row and column of H.
struct IntervalDerivs {
  double g1 = 0, g2 = 0;
  double h11 = 0, h12 = 0, h22 = 0;  // symmetric, negative semidefinite
};

/// Throws std::domain_error when the interval is empty/inverted or psi is -inf.
IntervalDerivs interval_grad_hess(Family f, const IntervalEndpoints& e);

namespace detail {
/// exp with the argument clamped to [-745, 709] so the result is always a
/// positive normal/subnormal double, never 0 or inf.
double exp_clamped(double x);
/// log(1 - exp(-x)) for x > 0.
double log1mexp(double x);
/// Scaled complementary error function exp(x^2) erfc(x) for x >= 0.
double erfcx_nonneg(double x);
}  // namespace detail

}  // namespace finreg
