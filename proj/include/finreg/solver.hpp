#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "finreg/objective.hpp"

namespace finreg {

struct SolverOptions {
  double c1 = 1.0;      // scaling of the stationarity map J
  double c2 = 0.25;     // inner tolerance factor, in [0, 1)
  double c3 = 1e-4;     // sufficient-decrease constant, in (0, 1/2)
  double shrink = 0.5;  // line-search backtracking factor, in (0, 1)
  double tol = 1e-8;    // outer tolerance on ||J(theta; c1)||_inf
  int max_outer = 200;
  int max_inner = 1000;      // coordinate-descent sweeps per subproblem
  int max_linesearch = 60;
  double L0 = 1.0;           // initial Lipschitz estimate (accelerated solver)
  int max_fista = 200000;

  void validate() const;
};

struct FitResult {
  Eigen::VectorXd theta;
  double objective = 0.0;   // penalized objective G_n^lambda(theta), average scale
  double j_norm = 0.0;      // ||J(theta; c1)||_inf at exit
  int outer_iters = 0;
  long total_inner_iters = 0;
  bool converged = false;
  bool stalled = false;     // line search or subproblem made no progress
  double neg_loglik = 0.0;  // total negative log-likelihood, n * G_n(theta)
  double lambda1 = 0.0, lambda2 = 0.0;
  std::vector<double> objective_trace;  // accepted objective per outer iteration
};

/// sign(x) max{|x| - lambda, 0}
double soft_threshold(double x, double lambda);

/// Stationarity residual J(theta; c1) = v - P(v - theta/c1), v = grad G_n +
/// lambda2 theta, with per-coordinate projection radius lambda1 w_j. J = 0 iff
/// theta solves the elastic-net problem. Coordinates with a finite lower bound
/// use the equivalent clamped proximal-step form so active bounds are handled.
Eigen::VectorXd j_residual(const ModelData& m, const Eigen::VectorXd& theta,
                           const PenaltySpec& pen, double c1);

/// Same residual for the quadratic subproblem: gradient and Hessian frozen at
/// theta_k. J_Q(theta_k; theta_k) = J(theta_k).
Eigen::VectorXd jq_residual(const ModelData& m, const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& theta_k, const PenaltySpec& pen, double c1);

/// Penalized quadratic subproblem data at an outer iterate. Za/Zb are the
/// model blocks; h11/h12/h22 the per-observation psi Hessian entries there.
struct QuadSubproblem {
  const Eigen::MatrixXd* Za = nullptr;
  const Eigen::MatrixXd* Zb = nullptr;
  Eigen::VectorXd h11, h12, h22;
  Eigen::VectorXd grad;     // smooth gradient of G_n at theta_k
  Eigen::VectorXd theta_k;
  double lambda2 = 0.0;
  Eigen::VectorXd lam1w;    // per-coordinate L1 radius lambda1 * w_j
  Eigen::VectorXd lower_bound;
};

Eigen::VectorXd jq_residual_sub(const QuadSubproblem& sub, const Eigen::VectorXd& theta, double c1);

struct InnerResult {
  Eigen::VectorXd theta;
  int sweeps = 0;
  double jq_norm = 0.0;  // Euclidean norm at exit
  bool hit_cap = false;
  int ridge_events = 0;  // coordinates that needed the curvature ridge fallback
};

/// Cyclic coordinate descent on the subproblem, terminated when
/// ||J_Q(theta)|| <= c2 ||J_Q(theta_k)|| (plus a small floor so c2 = 0 means
/// numerical exactness). Coordinates are clamped at their lower bounds.
InnerResult inner_cd_solve(const QuadSubproblem& sub, const SolverOptions& opts);

struct LineSearchResult {
  double s = 0.0;
  Eigen::VectorXd accepted;  // (1 - s) theta_k + s candidate
  double new_obj = 0.0;
  int evals = 0;
  bool ok = false;
};

/// Backtracking line search over s in {1, shrink, shrink^2, ...} against the
/// first-order model decrease with constant c3. Trial points with +inf
/// objective are rejected exactly like insufficient decrease.
LineSearchResult line_search(const std::function<double(const Eigen::VectorXd&)>& penalized_value,
                             double obj_k,
                             const Eigen::VectorXd& theta_k,
                             const Eigen::VectorXd& candidate,
                             const Eigen::VectorXd& v_k,  // grad G_n(theta_k) + lambda2 theta_k
                             const Eigen::VectorXd& lam1w,
                             const SolverOptions& opts);

/// Inexact proximal Newton (outer Newton steps, coordinate-descent inner
/// solves, backtracking line search). Deterministic; never reports a
/// non-stationary point as converged.
FitResult fit(const ModelData& m, const PenaltySpec& pen, const SolverOptions& opts = {},
              const std::optional<Eigen::VectorXd>& theta0 = std::nullopt);

/// Accelerated proximal-gradient solver for the same objective, used to
/// cross-check the proximal Newton path. Momentum restarts on objective
/// increase; infeasible proposals force step halving.
FitResult fit_fista(const ModelData& m, const PenaltySpec& pen, const SolverOptions& opts = {},
                    const std::optional<Eigen::VectorXd>& theta0 = std::nullopt);

/// Generic engine behind fit_fista: smooth part value/gradient supplied as
/// closures. `smooth_value` returns +inf at infeasible points; `smooth_grad`
/// is only called where the value is finite.
FitResult fista_engine(int d, const std::function<double(const Eigen::VectorXd&)>& smooth_value,
                       const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& smooth_grad,
                       const PenaltySpec& pen, const SolverOptions& opts,
                       const Eigen::VectorXd& theta0);

}  // namespace finreg
