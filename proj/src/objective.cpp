#include "finreg/objective.hpp"

#include <cmath>

namespace finreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

IntervalEndpoints endpoints_at(const ModelData& m, const EtaCache& eta, int i) {
  IntervalEndpoints e;
  e.lower = m.a_inf[i] ? ExtReal::neg_inf() : ExtReal::finite(eta.a[i]);
  e.upper = m.b_inf[i] ? ExtReal::pos_inf() : ExtReal::finite(eta.b[i]);
  return e;
}
}  // namespace

EtaCache linear_predictors(const ModelData& m, const Eigen::VectorXd& theta) {
  if (theta.size() != m.d) throw std::invalid_argument("theta has wrong dimension");
  EtaCache eta;
  eta.a = m.Za * theta + m.ma;
  eta.b = m.Zb * theta + m.mb;
  return eta;
}

double neg_loglik(const ModelData& m, const Eigen::VectorXd& theta) {
  const EtaCache eta = linear_predictors(m, theta);
  // extended-precision accumulation: line searches compare objective values
  // whose differences sit near the double rounding floor
  long double sum = 0.0L;
  for (int i = 0; i < m.n; ++i) {
    const double psi = log_interval_prob(m.family, endpoints_at(m, eta, i));
    if (psi == -kInf) return kInf;
    sum += psi;
  }
  return static_cast<double>(-sum / m.n);
}

ObsDerivs eval_obs_derivs(const ModelData& m, const Eigen::VectorXd& theta) {
  const EtaCache eta = linear_predictors(m, theta);
  ObsDerivs dv;
  dv.psi.resize(m.n);
  dv.g1.setZero(m.n);
  dv.g2.setZero(m.n);
  dv.h11.setZero(m.n);
  dv.h12.setZero(m.n);
  dv.h22.setZero(m.n);
  for (int i = 0; i < m.n; ++i) {
    const IntervalEndpoints e = endpoints_at(m, eta, i);
    const double psi = log_interval_prob(m.family, e);
    if (psi == -kInf)
      throw std::domain_error("derivatives requested at infeasible theta (observation " +
                              std::to_string(i + 1) + ")");
    dv.psi[i] = psi;
    const IntervalDerivs g = interval_grad_hess(m.family, e);
    dv.g1[i] = g.g1;
    dv.g2[i] = g.g2;
    dv.h11[i] = g.h11;
    dv.h12[i] = g.h12;
    dv.h22[i] = g.h22;
  }
  return dv;
}

Eigen::VectorXd grad_from_derivs(const ModelData& m, const ObsDerivs& dv) {
  return -(m.Za.transpose() * dv.g1 + m.Zb.transpose() * dv.g2) / m.n;
}

Eigen::MatrixXd hess_from_derivs(const ModelData& m, const ObsDerivs& dv) {
  const Eigen::MatrixXd HZa =
      m.Za.array().colwise() * dv.h11.array() + (m.Zb.array().colwise() * dv.h12.array()).array();
  const Eigen::MatrixXd HZb =
      m.Za.array().colwise() * dv.h12.array() + (m.Zb.array().colwise() * dv.h22.array()).array();
  Eigen::MatrixXd H = -(m.Za.transpose() * HZa + m.Zb.transpose() * HZb) / m.n;
  return 0.5 * (H + H.transpose());  // exact symmetry for eigenvalue routines
}

Eigen::VectorXd neg_loglik_grad(const ModelData& m, const Eigen::VectorXd& theta) {
  return grad_from_derivs(m, eval_obs_derivs(m, theta));
}

Eigen::MatrixXd neg_loglik_hess(const ModelData& m, const Eigen::VectorXd& theta) {
  return hess_from_derivs(m, eval_obs_derivs(m, theta));
}

double penalty_value(const PenaltySpec& pen, const Eigen::VectorXd& theta) {
  double l1 = 0.0;
  for (int j = 0; j < theta.size(); ++j) {
    if (theta[j] < pen.lower_bound[j]) return kInf;
    l1 += pen.l1_weight[j] * std::abs(theta[j]);
  }
  return pen.lambda1 * l1 + 0.5 * pen.lambda2 * theta.squaredNorm();
}

double penalized_obj(const ModelData& m, const Eigen::VectorXd& theta, const PenaltySpec& pen) {
  pen.validate(m.d);
  const double p = penalty_value(pen, theta);
  if (p == kInf) return kInf;
  const double g = neg_loglik(m, theta);
  return g == kInf ? kInf : g + p;
}

}  // namespace finreg
