#include <cmath>

#include "finreg/solver.hpp"

namespace finreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCurvFloor = 1e-12;  // degenerate-denominator threshold
constexpr double kCurvRidge = 1e-8;   // curvature added for the current subproblem only

// theta_j - clamped proximal step, elementwise; equals v - P(v - theta/c1)
// for unbounded coordinates.
double resid_coord(double theta_j, double v_j, double radius, double lb, double c1) {
  double step = soft_threshold(theta_j - c1 * v_j, c1 * radius);
  if (step < lb) step = lb;
  return (theta_j - step) / c1;
}

Eigen::VectorXd clamped_residual(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                                 const Eigen::VectorXd& lam1w, const Eigen::VectorXd& lb,
                                 double c1) {
  Eigen::VectorXd out(theta.size());
  for (int j = 0; j < theta.size(); ++j)
    out[j] = resid_coord(theta[j], v[j], lam1w[j], lb[j], c1);
  return out;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(c1 > 0)) throw std::invalid_argument("c1 must be positive");
  if (!(c2 >= 0 && c2 < 1)) throw std::invalid_argument("c2 must be in [0, 1)");
  if (!(c3 > 0 && c3 < 0.5)) throw std::invalid_argument("c3 must be in (0, 1/2)");
  if (!(shrink > 0 && shrink < 1)) throw std::invalid_argument("shrink must be in (0, 1)");
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  if (max_outer < 1 || max_inner < 1 || max_linesearch < 1 || max_fista < 1)
    throw std::invalid_argument("iteration caps must be positive");
  if (!(L0 > 0)) throw std::invalid_argument("L0 must be positive");
}

double soft_threshold(double x, double lambda) {
  if (x > lambda) return x - lambda;
  if (x < -lambda) return x + lambda;
  return 0.0;
}

Eigen::VectorXd j_residual(const ModelData& m, const Eigen::VectorXd& theta,
                           const PenaltySpec& pen, double c1) {
  pen.validate(m.d);
  if (!(c1 > 0)) throw std::invalid_argument("c1 must be positive");
  const Eigen::VectorXd v = neg_loglik_grad(m, theta) + pen.lambda2 * theta;
  return clamped_residual(theta, v, pen.lambda1 * pen.l1_weight, pen.lower_bound, c1);
}

Eigen::VectorXd jq_residual_sub(const QuadSubproblem& sub, const Eigen::VectorXd& theta, double c1) {
  const Eigen::VectorXd dth = theta - sub.theta_k;
  // hess(G_n) * dth via the per-observation psi Hessians
  const Eigen::VectorXd da = (*sub.Za) * dth;
  const Eigen::VectorXd db = (*sub.Zb) * dth;
  const Eigen::VectorXd pa = sub.h11.cwiseProduct(da) + sub.h12.cwiseProduct(db);
  const Eigen::VectorXd pb = sub.h12.cwiseProduct(da) + sub.h22.cwiseProduct(db);
  const double n = static_cast<double>(sub.Za->rows());
  const Eigen::VectorXd u =
      sub.grad - (sub.Za->transpose() * pa + sub.Zb->transpose() * pb) / n + sub.lambda2 * theta;
  return clamped_residual(theta, u, sub.lam1w, sub.lower_bound, c1);
}

Eigen::VectorXd jq_residual(const ModelData& m, const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& theta_k, const PenaltySpec& pen, double c1) {
  pen.validate(m.d);
  if (!(c1 > 0)) throw std::invalid_argument("c1 must be positive");
  const ObsDerivs dv = eval_obs_derivs(m, theta_k);
  QuadSubproblem sub;
  sub.Za = &m.Za;
  sub.Zb = &m.Zb;
  sub.h11 = dv.h11;
  sub.h12 = dv.h12;
  sub.h22 = dv.h22;
  sub.grad = grad_from_derivs(m, dv);
  sub.theta_k = theta_k;
  sub.lambda2 = pen.lambda2;
  sub.lam1w = pen.lambda1 * pen.l1_weight;
  sub.lower_bound = pen.lower_bound;
  return jq_residual_sub(sub, theta, c1);
}

InnerResult inner_cd_solve(const QuadSubproblem& sub, const SolverOptions& opts) {
  const auto& Za = *sub.Za;
  const auto& Zb = *sub.Zb;
  const int d = static_cast<int>(sub.theta_k.size());
  const double n = static_cast<double>(Za.rows());

  // Column caches: HZa_j = h11 .* Za_j + h12 .* Zb_j, HZb_j = h12 .* Za_j + h22 .* Zb_j,
  // so (Z^j)' H delta = HZa_j . da + HZb_j . db and the per-coordinate curvature
  // is -(Za_j . HZa_j + Zb_j . HZb_j)/n.
  const Eigen::MatrixXd HZa = (Za.array().colwise() * sub.h11.array()).matrix() +
                              (Zb.array().colwise() * sub.h12.array()).matrix();
  const Eigen::MatrixXd HZb = (Za.array().colwise() * sub.h12.array()).matrix() +
                              (Zb.array().colwise() * sub.h22.array()).matrix();

  InnerResult res;
  Eigen::VectorXd curv(d);
  for (int j = 0; j < d; ++j) {
    double hj = -(Za.col(j).dot(HZa.col(j)) + Zb.col(j).dot(HZb.col(j))) / n;
    if (hj < 0) hj = 0;  // guard against roundoff; psi Hessians are NSD
    double aj = hj + sub.lambda2;
    if (aj <= kCurvFloor) {
      aj += kCurvRidge;
      ++res.ridge_events;
    }
    curv[j] = aj;
  }

  Eigen::VectorXd theta = sub.theta_k;
  Eigen::VectorXd da = Eigen::VectorXd::Zero(Za.rows());  // Z (theta - theta_k), both rows
  Eigen::VectorXd db = Eigen::VectorXd::Zero(Za.rows());

  const double jq0 = jq_residual_sub(sub, sub.theta_k, opts.c1).norm();
  // forcing sequence: at most c2 * ||J_Q(theta_k)||, tightened to c2 * ||J_Q||^2
  // near stationarity so the outer iteration converges superlinearly and the
  // line search keeps certifiable decreases
  const double c2_eff = opts.c2 * std::min(1.0, jq0);
  const double target = std::max(c2_eff * jq0, 1e-14 * std::max(1.0, jq0));
  res.jq_norm = jq0;
  if (jq0 <= 0.0) {  // already stationary for the subproblem
    res.theta = theta;
    res.sweeps = 1;
    return res;
  }

  for (int sweep = 1; sweep <= opts.max_inner; ++sweep) {
    double max_step = 0.0;
    for (int j = 0; j < d; ++j) {
      const double hj = curv[j] - sub.lambda2;  // may include the ridge
      const double sj = (HZa.col(j).dot(da) + HZb.col(j).dot(db)) / n;
      double t = soft_threshold(theta[j] * hj + sj - sub.grad[j], sub.lam1w[j]) / curv[j];
      if (t < sub.lower_bound[j]) t = sub.lower_bound[j];
      const double delta = t - theta[j];
      if (delta != 0.0) {
        da += delta * Za.col(j);
        db += delta * Zb.col(j);
        theta[j] = t;
        max_step = std::max(max_step, std::abs(delta));
      }
    }
    res.sweeps = sweep;
    res.jq_norm = jq_residual_sub(sub, theta, opts.c1).norm();
    if (res.jq_norm <= target) break;
    if (max_step <= 1e-16 * std::max(1.0, theta.cwiseAbs().maxCoeff())) break;  // stagnated
    if (sweep == opts.max_inner) res.hit_cap = true;
  }
  res.theta = std::move(theta);
  return res;
}

LineSearchResult line_search(const std::function<double(const Eigen::VectorXd&)>& penalized_value,
                             double obj_k,
                             const Eigen::VectorXd& theta_k,
                             const Eigen::VectorXd& candidate,
                             const Eigen::VectorXd& v_k,
                             const Eigen::VectorXd& lam1w,
                             const SolverOptions& opts) {
  LineSearchResult out;
  const Eigen::VectorXd delta = candidate - theta_k;
  const double dir = v_k.dot(delta);
  const double l1_k = lam1w.dot(theta_k.cwiseAbs());

  double s = 1.0;
  for (int it = 0; it < opts.max_linesearch; ++it, s *= opts.shrink) {
    Eigen::VectorXd trial = theta_k + s * delta;
    const double val = penalized_value(trial);
    ++out.evals;
    if (val == kInf) continue;
    // model decrease L(theta_k) - L(trial): linear part plus exact L1 change
    const double model_dec = -s * dir + (l1_k - lam1w.dot(trial.cwiseAbs()));
    const double actual_dec = obj_k - val;
    if (actual_dec >= opts.c3 * model_dec && actual_dec >= 0.0) {
      out.s = s;
      out.accepted = std::move(trial);
      out.new_obj = val;
      out.ok = true;
      return out;
    }
  }
  out.s = 0.0;  // stall
  return out;
}

FitResult fit(const ModelData& m, const PenaltySpec& pen, const SolverOptions& opts,
              const std::optional<Eigen::VectorXd>& theta0) {
  opts.validate();
  pen.validate(m.d);

  FitResult res;
  res.lambda1 = pen.lambda1;
  res.lambda2 = pen.lambda2;

  Eigen::VectorXd theta = theta0 ? *theta0 : m.theta_init;
  if (theta.size() != m.d) throw std::invalid_argument("theta0 has wrong dimension");
  double obj = penalized_obj(m, theta, pen);
  if (obj == kInf) throw numeric_error("initial point is infeasible");
  res.objective_trace.push_back(obj);

  const Eigen::VectorXd lam1w = pen.lambda1 * pen.l1_weight;
  const auto pen_value = [&](const Eigen::VectorXd& t) { return penalized_obj(m, t, pen); };

  double g_value = 0.0;  // G_n at current theta
  for (int k = 1; k <= opts.max_outer; ++k) {
    const ObsDerivs dv = eval_obs_derivs(m, theta);
    long double psum = 0.0L;
    for (int i = 0; i < m.n; ++i) psum += dv.psi[i];
    g_value = static_cast<double>(-psum / m.n);
    const Eigen::VectorXd grad = grad_from_derivs(m, dv);
    const Eigen::VectorXd v = grad + pen.lambda2 * theta;
    const Eigen::VectorXd J = clamped_residual(theta, v, lam1w, pen.lower_bound, opts.c1);
    res.j_norm = J.lpNorm<Eigen::Infinity>();
    if (res.j_norm <= opts.tol) {
      res.converged = true;
      break;
    }

    QuadSubproblem sub;
    sub.Za = &m.Za;
    sub.Zb = &m.Zb;
    sub.h11 = dv.h11;
    sub.h12 = dv.h12;
    sub.h22 = dv.h22;
    sub.grad = grad;
    sub.theta_k = theta;
    sub.lambda2 = pen.lambda2;
    sub.lam1w = lam1w;
    sub.lower_bound = pen.lower_bound;
    const InnerResult inner = inner_cd_solve(sub, opts);
    res.total_inner_iters += inner.sweeps;
    res.outer_iters = k;

    const double step_size = (inner.theta - theta).lpNorm<Eigen::Infinity>();
    if (step_size <= 1e-16 * std::max(1.0, theta.cwiseAbs().maxCoeff())) {
      res.stalled = true;  // subproblem solution is the current point but J > tol
      break;
    }

    const LineSearchResult ls = line_search(pen_value, obj, theta, inner.theta, v, lam1w, opts);
    if (!ls.ok) {
      res.stalled = true;
      break;
    }
    theta = ls.accepted;
    obj = ls.new_obj;
    res.objective_trace.push_back(obj);
  }

  if (!res.converged && !res.stalled) {
    // ran out of outer iterations; recompute residual and value at the final point
    g_value = neg_loglik(m, theta);
    const Eigen::VectorXd v = neg_loglik_grad(m, theta) + pen.lambda2 * theta;
    res.j_norm = clamped_residual(theta, v, lam1w, pen.lower_bound, opts.c1).lpNorm<Eigen::Infinity>();
    res.converged = res.j_norm <= opts.tol;
  }

  res.theta = std::move(theta);
  res.objective = obj;
  res.neg_loglik = m.n * g_value;
  return res;
}

}  // namespace finreg
