#include "finreg/inference.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <set>

namespace finreg {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;

void require_unpenalized(const FitResult& fit, const char* what) {
  if (fit.lambda1 != 0.0 || fit.lambda2 != 0.0)
    throw std::invalid_argument(std::string(what) + " requires an unpenalized fit");
}
}  // namespace

double normal_sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

double chisq_sf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chisq_sf: df must be >= 1");
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

Eigen::MatrixXd observed_information(const ModelData& m, const Eigen::VectorXd& theta_hat) {
  return m.n * neg_loglik_hess(m, theta_hat);
}

InferenceTable wald_table(const ModelData& m, const FitResult& fit,
                          const std::optional<Eigen::VectorXd>& null_values) {
  require_unpenalized(fit, "wald_table");
  if (fit.theta.size() != m.d) throw std::invalid_argument("fit does not match model dimension");

  InferenceTable tab;
  tab.estimates = fit.theta;
  tab.labels = m.labels;
  tab.loglik = -fit.neg_loglik;
  tab.bic = m.d * std::log(static_cast<double>(m.n)) - 2.0 * tab.loglik;

  Eigen::VectorXd null0 = Eigen::VectorXd::Zero(m.d);
  for (int j = 0; j < m.d; ++j)
    if (m.roles[j] == ParamRole::scale) null0[j] = 1.0;
  if (null_values) {
    if (null_values->size() != m.d) throw std::invalid_argument("null_values has wrong length");
    null0 = *null_values;
  }

  const Eigen::MatrixXd info = observed_information(m, fit.theta);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double ev_max = std::max(ev.maxCoeff(), 0.0);
  const double cutoff = std::max(ev_max, 1.0) * m.d * 1e-14;
  tab.info_rank = static_cast<int>((ev.array() > cutoff).count());
  tab.info_ok = tab.info_rank == m.d;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  tab.std_errors.setConstant(m.d, nan);
  tab.z_values.setConstant(m.d, nan);
  tab.p_values.setConstant(m.d, nan);
  if (tab.info_ok) {
    const Eigen::MatrixXd inv =
        es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    for (int j = 0; j < m.d; ++j) {
      tab.std_errors[j] = std::sqrt(inv(j, j));
      tab.z_values[j] = (fit.theta[j] - null0[j]) / tab.std_errors[j];
      tab.p_values[j] = 2.0 * normal_sf(std::abs(tab.z_values[j]));
    }
  }
  return tab;
}

LrtResult lrt(const FitResult& fit_small, const FitResult& fit_large, int df) {
  require_unpenalized(fit_small, "lrt");
  require_unpenalized(fit_large, "lrt");
  if (df < 1) throw std::invalid_argument("lrt: df must be >= 1");
  const double ll_s = -fit_small.neg_loglik;
  const double ll_l = -fit_large.neg_loglik;
  if (ll_s > ll_l + 1e-8)
    throw std::invalid_argument("lrt: small model log-likelihood exceeds the large model's; "
                                "models are not nested as given");
  LrtResult out;
  out.stat = std::max(0.0, 2.0 * (ll_l - ll_s));
  out.df = df;
  out.p = chisq_sf(out.stat, df);
  return out;
}

double bic(const FitResult& fit, int n, int d_free) {
  require_unpenalized(fit, "bic");
  if (d_free == 0 && fit.neg_loglik == 0.0) return 0.0;
  return d_free * std::log(static_cast<double>(n)) + 2.0 * fit.neg_loglik;
}

PredictSpec make_predict_spec(const ModelData& m) {
  PredictSpec spec;
  spec.cls = m.inputs.cls;
  spec.scale = m.inputs.scale;
  spec.family = m.family;
  spec.p = static_cast<int>(m.inputs.X.cols());
  spec.n_categories = m.inputs.n_categories;
  spec.basis_kind = m.inputs.basis.kind;
  if (spec.cls == ModelClass::cumulative) return spec;

  std::set<double> cuts;
  for (const auto& e : m.inputs.lower)
    if (e.is_finite() && !(spec.cls == ModelClass::survival && e.value == 0.0)) cuts.insert(e.value);
  for (const auto& e : m.inputs.upper)
    if (e.is_finite()) cuts.insert(e.value);
  spec.cuts.assign(cuts.begin(), cuts.end());

  if (spec.basis_kind == SurvivalBasisKind::custom) {
    // harvest basis values for each grid cut from any training row that used it
    const int q = static_cast<int>(m.inputs.basis.at_lower.cols());
    spec.basis_at_cuts.setZero(static_cast<int>(spec.cuts.size()), q);
    for (size_t c = 0; c < spec.cuts.size(); ++c) {
      bool found = false;
      for (int i = 0; i < m.n && !found; ++i) {
        if (m.inputs.lower[i].is_finite() && m.inputs.lower[i].value == spec.cuts[c]) {
          spec.basis_at_cuts.row(c) = m.inputs.basis.at_lower.row(i);
          found = true;
        } else if (m.inputs.upper[i].is_finite() && m.inputs.upper[i].value == spec.cuts[c]) {
          spec.basis_at_cuts.row(c) = m.inputs.basis.at_upper.row(i);
          found = true;
        }
      }
    }
  }
  return spec;
}

Eigen::VectorXd predict_probs(const PredictSpec& spec, const Eigen::VectorXd& theta,
                              const Eigen::VectorXd& x) {
  if (x.size() != spec.p) throw std::invalid_argument("predictor vector has wrong length");

  ModelData cells;
  switch (spec.cls) {
    case ModelClass::cumulative: {
      const int m_cat = spec.n_categories;
      std::vector<int> y(m_cat);
      Eigen::MatrixXd X(m_cat, spec.p);
      for (int j = 0; j < m_cat; ++j) {
        y[j] = j + 1;
        X.row(j) = x.transpose();
      }
      cells = build_cumulative(y, m_cat, X, spec.family);
      break;
    }
    case ModelClass::interval_regression: {
      const int k = static_cast<int>(spec.cuts.size());
      if (k == 0) throw std::invalid_argument("prediction grid is empty");
      std::vector<ExtReal> lo(k + 1), hi(k + 1);
      Eigen::MatrixXd X(k + 1, spec.p);
      for (int j = 0; j <= k; ++j) {
        lo[j] = j == 0 ? ExtReal::neg_inf() : ExtReal::finite(spec.cuts[j - 1]);
        hi[j] = j == k ? ExtReal::pos_inf() : ExtReal::finite(spec.cuts[j]);
        X.row(j) = x.transpose();
      }
      cells = build_interval_regression(X, lo, hi, spec.scale, spec.family);
      break;
    }
    case ModelClass::survival: {
      const int k = static_cast<int>(spec.cuts.size());
      if (k == 0) throw std::invalid_argument("prediction grid is empty");
      std::vector<double> lo(k + 1);
      std::vector<ExtReal> hi(k + 1);
      Eigen::MatrixXd X(k + 1, spec.p);
      SurvivalBasis basis;
      basis.kind = spec.basis_kind;
      if (basis.kind == SurvivalBasisKind::custom) {
        const int q = static_cast<int>(spec.basis_at_cuts.cols());
        basis.at_lower.setZero(k + 1, q);
        basis.at_upper.setZero(k + 1, q);
        for (int j = 0; j <= k; ++j) {
          if (j > 0) basis.at_lower.row(j) = spec.basis_at_cuts.row(j - 1);
          if (j < k) basis.at_upper.row(j) = spec.basis_at_cuts.row(j);
        }
      }
      for (int j = 0; j <= k; ++j) {
        lo[j] = j == 0 ? 0.0 : spec.cuts[j - 1];
        hi[j] = j == k ? ExtReal::pos_inf() : ExtReal::finite(spec.cuts[j]);
        X.row(j) = x.transpose();
      }
      cells = build_survival(lo, hi, X, basis);
      break;
    }
  }

  Eigen::VectorXd probs(cells.n);
  const EtaCache eta = linear_predictors(cells, theta);
  for (int i = 0; i < cells.n; ++i) {
    IntervalEndpoints e;
    e.lower = cells.a_inf[i] ? ExtReal::neg_inf() : ExtReal::finite(eta.a[i]);
    e.upper = cells.b_inf[i] ? ExtReal::pos_inf() : ExtReal::finite(eta.b[i]);
    const double psi = log_interval_prob(cells.family, e);
    if (psi == -std::numeric_limits<double>::infinity())
      throw std::domain_error("predict_probs: theta is infeasible for the category grid");
    probs[i] = std::exp(psi);
  }
  return probs;
}

}  // namespace finreg
