#include "finreg/families.hpp"

#include <algorithm>
#include <cmath>

namespace finreg {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2*pi)
constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double softplus(double x) {  // log(1 + e^x)
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

namespace detail {

double exp_clamped(double x) { return std::exp(std::clamp(x, -745.0, 709.0)); }

double log1mexp(double x) {
  // Two-branch form; the crossover at log 2 keeps full precision on both sides.
  if (x <= 0.0) return kNegInf;
  return x <= 0.6931471805599453 ? std::log(-std::expm1(-x)) : std::log1p(-std::exp(-x));
}

double erfcx_nonneg(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series 1/(x sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2x^2)^k.
  const double z = 0.5 / (x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 10; ++k) {
    term *= -(2.0 * k - 1.0) * z;
    sum += term;
    if (std::abs(term) < 1e-18 * sum) break;
  }
  return sum / (x * 1.7724538509055160273);  // sqrt(pi)
}

}  // namespace detail

Family family_from_string(const std::string& s) {
  if (s == "gaussian" || s == "normal") return Family::gaussian;
  if (s == "logistic") return Family::logistic;
  if (s == "extreme-value" || s == "extreme_value" || s == "ev") return Family::extreme_value;
  throw data_error("unknown family: " + s);
}

const char* family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::logistic: return "logistic";
    case Family::extreme_value: return "extreme-value";
  }
  return "?";
}

double log_cdf(Family f, double w) {
  switch (f) {
    case Family::gaussian:
      if (w < 0.0)
        return -0.5 * w * w - 0.6931471805599453 + std::log(detail::erfcx_nonneg(-w * kInvSqrt2));
      return std::log1p(-0.5 * std::erfc(w * kInvSqrt2));
    case Family::logistic:
      return -softplus(-w);
    case Family::extreme_value: {
      const double u = detail::exp_clamped(w);
      if (u < 1e-8) return w + std::log1p(-0.5 * u);  // R(w) = u(1 - u/2 + ...)
      return detail::log1mexp(u);
    }
  }
  return kNegInf;
}

double log_survival(Family f, double w) {
  switch (f) {
    case Family::gaussian:
      return log_cdf(Family::gaussian, -w);
    case Family::logistic:
      return -softplus(w);
    case Family::extreme_value:
      return -detail::exp_clamped(w);  // exact: S(w) = exp(-e^w)
  }
  return kNegInf;
}

double log_density_slope(Family f, double w) {
  switch (f) {
    case Family::gaussian: return -w;
    case Family::logistic: return -std::tanh(0.5 * w);
    case Family::extreme_value: return 1.0 - detail::exp_clamped(w);
  }
  return 0.0;
}

FamilyEval family_eval(Family f, double w) {
  FamilyEval out{};
  switch (f) {
    case Family::gaussian: {
      out.log_pdf = -0.5 * w * w - kLogSqrt2Pi;
      out.pdf = kInvSqrt2Pi * detail::exp_clamped(-0.5 * w * w);
      out.cdf = detail::exp_clamped(log_cdf(f, w));
      out.pdf_prime = -w * out.pdf;
      break;
    }
    case Family::logistic: {
      out.log_pdf = -softplus(w) - softplus(-w);
      out.pdf = detail::exp_clamped(out.log_pdf);
      out.cdf = detail::exp_clamped(-softplus(-w));
      out.pdf_prime = out.pdf * -std::tanh(0.5 * w);
      break;
    }
    case Family::extreme_value: {
      const double u = detail::exp_clamped(w);
      out.log_pdf = w - u;
      out.pdf = detail::exp_clamped(out.log_pdf);
      out.cdf = std::max(-std::expm1(-u), std::numeric_limits<double>::min());
      out.pdf_prime = out.pdf * (1.0 - u);
      break;
    }
  }
  out.cdf = std::clamp(out.cdf, std::numeric_limits<double>::min(),
                       1.0 - std::numeric_limits<double>::epsilon() / 2);
  out.pdf = std::max(out.pdf, std::numeric_limits<double>::denorm_min());
  return out;
}

double log_interval_prob(Family f, const IntervalEndpoints& e) {
  const bool lo_inf = e.lower.kind == ExtReal::NegInf;
  const bool hi_inf = e.upper.kind == ExtReal::PosInf;
  // Inverted tags: lower at +inf or upper at -inf give an empty interval.
  if (e.lower.kind == ExtReal::PosInf || e.upper.kind == ExtReal::NegInf) return kNegInf;
  if (lo_inf && hi_inf) return 0.0;
  if (lo_inf) return log_cdf(f, e.upper.value);
  if (hi_inf) return log_survival(f, e.lower.value);

  const double t1 = e.lower.value, t2 = e.upper.value;
  if (!(t1 < t2)) return kNegInf;

  // R(t2) - R(t1) anchored at whichever endpoint mass is smaller:
  // left tail via CDFs, right tail via survival functions.
  const double lr2 = log_cdf(f, t2);
  const double ls1 = log_survival(f, t1);
  if (lr2 <= ls1) {
    return lr2 + detail::log1mexp(lr2 - log_cdf(f, t1));
  }
  return ls1 + detail::log1mexp(ls1 - log_survival(f, t2));
}

IntervalDerivs interval_grad_hess(Family f, const IntervalEndpoints& e) {
  const double psi = log_interval_prob(f, e);
  if (!(psi > kNegInf)) throw std::domain_error("interval_grad_hess: empty or inverted interval");

  IntervalDerivs out{};
  const bool lo_fin = e.lower.is_finite();
  const bool hi_fin = e.upper.is_finite();
  double u1 = 0.0, u2 = 0.0;  // r(t)/D via exp{log r(t) - psi}
  if (lo_fin) {
    const double w = e.lower.value;
    u1 = detail::exp_clamped(family_eval(f, w).log_pdf - psi);
    out.g1 = -u1;
    out.h11 = -log_density_slope(f, w) * u1 - u1 * u1;
  }
  if (hi_fin) {
    const double w = e.upper.value;
    u2 = detail::exp_clamped(family_eval(f, w).log_pdf - psi);
    out.g2 = u2;
    out.h22 = log_density_slope(f, w) * u2 - u2 * u2;
  }
  if (lo_fin && hi_fin) out.h12 = u1 * u2;
  return out;
}

}  // namespace finreg
