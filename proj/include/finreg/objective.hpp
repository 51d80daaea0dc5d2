#pragma once

#include <Eigen/Dense>

#include "finreg/model.hpp"

namespace finreg {

/// Per-observation interval log-probabilities and derivatives at a feasible
/// theta. Entries of g/H are zeroed at infinite endpoints, so assembling
/// gradients and Hessians is plain linear algebra over Za/Zb.
struct ObsDerivs {
  Eigen::VectorXd psi;
  Eigen::VectorXd g1, g2;
  Eigen::VectorXd h11, h12, h22;
};

/// Cached linear predictors eta_i = Z_i theta + m_i for one theta. Entries at
/// infinite endpoints carry the flag instead of a usable value.
struct EtaCache {
  Eigen::VectorXd a, b;
};

EtaCache linear_predictors(const ModelData& m, const Eigen::VectorXd& theta);

/// Average negative log-likelihood G_n(theta); +inf if any observation has an
/// empty or inverted interval at theta.
double neg_loglik(const ModelData& m, const Eigen::VectorXd& theta);

/// Exact gradient/Hessian of G_n. Both throw std::domain_error at infeasible
/// theta: values may probe infeasibility in line searches, derivatives are
/// only ever requested at accepted iterates.
Eigen::VectorXd neg_loglik_grad(const ModelData& m, const Eigen::VectorXd& theta);
Eigen::MatrixXd neg_loglik_hess(const ModelData& m, const Eigen::VectorXd& theta);

ObsDerivs eval_obs_derivs(const ModelData& m, const Eigen::VectorXd& theta);
Eigen::VectorXd grad_from_derivs(const ModelData& m, const ObsDerivs& dv);
Eigen::MatrixXd hess_from_derivs(const ModelData& m, const ObsDerivs& dv);

/// lambda1 * sum_j w_j |theta_j| + (lambda2/2) ||theta||^2, or +inf when a
/// coordinate violates its lower bound.
double penalty_value(const PenaltySpec& pen, const Eigen::VectorXd& theta);

/// G_n(theta) + penalty; +inf propagates.
double penalized_obj(const ModelData& m, const Eigen::VectorXd& theta, const PenaltySpec& pen);

}  // namespace finreg
