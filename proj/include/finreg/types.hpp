#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace finreg {

/// Thrown for malformed or inconsistent input data (bad intervals, dimension
/// mismatches, unparsable files).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a computation cannot proceed numerically (infeasible points
/// where derivatives are requested, singular information, solver stalls).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Extended real carried as value + tag. Infinite endpoints are structural
/// (they zero rows of the design blocks), so the tag is explicit rather than
/// encoded through IEEE infinities in arithmetic paths.
struct ExtReal {
  enum Kind : std::int8_t { NegInf = -1, Finite = 0, PosInf = 1 };

  double value = 0.0;
  Kind kind = Finite;

  static ExtReal finite(double v) {
    if (!std::isfinite(v)) throw data_error("ExtReal::finite: value is not finite");
    return ExtReal{v, Finite};
  }
  static ExtReal neg_inf() { return ExtReal{0.0, NegInf}; }
  static ExtReal pos_inf() { return ExtReal{0.0, PosInf}; }

  /// Maps IEEE +-inf to the tagged representation; NaN is rejected.
  static ExtReal from_double(double v) {
    if (std::isnan(v)) throw data_error("ExtReal: NaN is not a valid endpoint");
    if (v == std::numeric_limits<double>::infinity()) return pos_inf();
    if (v == -std::numeric_limits<double>::infinity()) return neg_inf();
    return ExtReal{v, Finite};
  }

  bool is_finite() const { return kind == Finite; }

  double as_double() const {
    if (kind == NegInf) return -std::numeric_limits<double>::infinity();
    if (kind == PosInf) return std::numeric_limits<double>::infinity();
    return value;
  }
};

/// Strict order on the extended real line.
inline bool ext_less(const ExtReal& a, const ExtReal& b) {
  if (a.kind == ExtReal::NegInf) return b.kind != ExtReal::NegInf;
  if (a.kind == ExtReal::PosInf) return false;
  if (b.kind == ExtReal::PosInf) return true;
  if (b.kind == ExtReal::NegInf) return false;
  return a.value < b.value;
}

}  // namespace finreg
