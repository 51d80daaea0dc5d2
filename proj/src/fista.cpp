#include <cmath>

#include "finreg/solver.hpp"

namespace finreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd prox_step(const Eigen::VectorXd& y, const Eigen::VectorXd& g, double L,
                          const Eigen::VectorXd& lam1w, const Eigen::VectorXd& lb) {
  Eigen::VectorXd out(y.size());
  for (int j = 0; j < y.size(); ++j) {
    double t = soft_threshold(y[j] - g[j] / L, lam1w[j] / L);
    if (t < lb[j]) t = lb[j];
    out[j] = t;
  }
  return out;
}
}  // namespace

FitResult fista_engine(int d, const std::function<double(const Eigen::VectorXd&)>& smooth_value,
                       const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& smooth_grad,
                       const PenaltySpec& pen, const SolverOptions& opts,
                       const Eigen::VectorXd& theta0) {
  opts.validate();
  pen.validate(d);
  const Eigen::VectorXd lam1w = pen.lambda1 * pen.l1_weight;
  const auto l1 = [&](const Eigen::VectorXd& t) { return lam1w.dot(t.cwiseAbs()); };
  // smooth part F = G + (lambda2/2)||theta||^2; nonsmooth part is the weighted L1
  const auto f_value = [&](const Eigen::VectorXd& t) {
    const double g = smooth_value(t);
    return g == kInf ? kInf : g + 0.5 * pen.lambda2 * t.squaredNorm();
  };

  FitResult res;
  res.lambda1 = pen.lambda1;
  res.lambda2 = pen.lambda2;

  Eigen::VectorXd theta = theta0;
  double f_theta = f_value(theta);
  if (f_theta == kInf) throw numeric_error("initial point is infeasible");
  double obj = f_theta + l1(theta);
  res.objective_trace.push_back(obj);

  Eigen::VectorXd y = theta;
  double t_mom = 1.0;
  double L = opts.L0;

  for (int k = 1; k <= opts.max_fista; ++k) {
    double f_y = f_value(y);
    if (f_y == kInf) {  // extrapolation left the domain: restart momentum
      y = theta;
      t_mom = 1.0;
      f_y = f_theta;
    }
    const Eigen::VectorXd g_y = smooth_grad(y) + pen.lambda2 * y;

    Eigen::VectorXd cand;
    double f_cand = kInf;
    while (true) {
      cand = prox_step(y, g_y, L, lam1w, pen.lower_bound);
      f_cand = f_value(cand);
      if (f_cand != kInf) {
        const Eigen::VectorXd dz = cand - y;
        if (f_cand <= f_y + g_y.dot(dz) + 0.5 * L * dz.squaredNorm()) break;
      }
      L *= 2.0;
      if (L > 1e18) {
        res.stalled = true;
        break;
      }
    }
    if (res.stalled) break;
    res.outer_iters = k;

    const double new_obj = f_cand + l1(cand);
    const Eigen::VectorXd prev = theta;
    theta = cand;
    f_theta = f_cand;
    res.objective_trace.push_back(new_obj);

    // stationarity check at the new iterate
    const Eigen::VectorXd v = smooth_grad(theta) + pen.lambda2 * theta;
    double jn = 0.0;
    for (int j = 0; j < d; ++j) {
      double step = soft_threshold(theta[j] - opts.c1 * v[j], opts.c1 * lam1w[j]);
      if (step < pen.lower_bound[j]) step = pen.lower_bound[j];
      jn = std::max(jn, std::abs(theta[j] - step) / opts.c1);
    }
    res.j_norm = jn;
    if (jn <= opts.tol) {
      res.converged = true;
      obj = new_obj;
      break;
    }

    if (new_obj > obj) {  // restart momentum on objective increase
      t_mom = 1.0;
      y = theta;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
      y = theta + ((t_mom - 1.0) / t_next) * (theta - prev);
      t_mom = t_next;
    }
    obj = new_obj;
    L = std::max(opts.L0, L * 0.5);  // allow the local estimate to relax
  }

  res.theta = theta;
  res.objective = obj;
  return res;
}

FitResult fit_fista(const ModelData& m, const PenaltySpec& pen, const SolverOptions& opts,
                    const std::optional<Eigen::VectorXd>& theta0) {
  pen.validate(m.d);
  const Eigen::VectorXd start = theta0 ? *theta0 : m.theta_init;
  if (start.size() != m.d) throw std::invalid_argument("theta0 has wrong dimension");
  FitResult res = fista_engine(
      m.d, [&](const Eigen::VectorXd& t) { return neg_loglik(m, t); },
      [&](const Eigen::VectorXd& t) { return neg_loglik_grad(m, t); }, pen, opts, start);
  res.neg_loglik = m.n * neg_loglik(m, res.theta);
  return res;
}

}  // namespace finreg
