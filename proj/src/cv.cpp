#include "finreg/cv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "finreg/rng.hpp"

namespace finreg {

namespace {

std::vector<int> penalized_coords(const PenaltySpec& pen) {
  std::vector<int> out;
  for (int j = 0; j < pen.l1_weight.size(); ++j)
    if (pen.l1_weight[j] > 0) out.push_back(j);
  return out;
}

}  // namespace

FitResult restricted_fit(const ModelData& m, const PenaltySpec& tmpl, const SolverOptions& opts) {
  tmpl.validate(m.d);
  std::vector<int> keep;
  for (int j = 0; j < m.d; ++j)
    if (tmpl.l1_weight[j] == 0.0) keep.push_back(j);

  FitResult out;
  out.theta = Eigen::VectorXd::Zero(m.d);
  if (keep.empty()) {
    // nothing to optimize; evaluate at zero (feasible whenever intervals are proper)
    const double g = neg_loglik(m, out.theta);
    if (g == std::numeric_limits<double>::infinity())
      throw numeric_error("restricted fit: theta = 0 is infeasible for this model");
    out.objective = g;
    out.neg_loglik = m.n * g;
    out.converged = true;
    return out;
  }

  const ModelData sub = subset_columns(m, keep);
  PenaltySpec pen = sub.penalty_default;
  pen.lambda1 = 0.0;
  pen.lambda2 = tmpl.lambda2;
  pen.l1_weight.setZero();
  FitResult r = fit(sub, pen, opts);
  for (size_t c = 0; c < keep.size(); ++c) out.theta[keep[c]] = r.theta[c];
  out.objective = r.objective;
  out.neg_loglik = r.neg_loglik;
  out.converged = r.converged;
  out.stalled = r.stalled;
  out.j_norm = r.j_norm;
  out.outer_iters = r.outer_iters;
  out.total_inner_iters = r.total_inner_iters;
  out.lambda2 = tmpl.lambda2;
  return out;
}

double lambda_max(const ModelData& m, const PenaltySpec& tmpl, const SolverOptions& opts) {
  tmpl.validate(m.d);
  const std::vector<int> pencoords = penalized_coords(tmpl);
  if (pencoords.empty())
    throw std::invalid_argument("lambda_max: model has no penalized coordinates");
  const FitResult r = restricted_fit(m, tmpl, opts);
  const Eigen::VectorXd g = neg_loglik_grad(m, r.theta);
  double lmax = 0.0;
  for (int j : pencoords) lmax = std::max(lmax, std::abs(g[j]) / tmpl.l1_weight[j]);
  return lmax;
}

Eigen::VectorXd lambda_path(const ModelData& m, const PenaltySpec& tmpl, int n_lambda,
                            double ratio, const SolverOptions& opts) {
  if (n_lambda < 1) throw std::invalid_argument("lambda_path: n_lambda must be >= 1");
  if (!(ratio > 0 && ratio < 1)) throw std::invalid_argument("lambda_path: ratio must be in (0, 1)");
  const double lmax = lambda_max(m, tmpl, opts);
  Eigen::VectorXd grid(n_lambda);
  if (n_lambda == 1) {
    grid[0] = lmax;
    return grid;
  }
  const double log_max = std::log(lmax), log_min = std::log(lmax * ratio);
  for (int i = 0; i < n_lambda; ++i)
    grid[i] = std::exp(log_max + (log_min - log_max) * i / (n_lambda - 1));
  return grid;
}

std::vector<FitResult> fit_path(const ModelData& m, const PenaltySpec& tmpl,
                                const Eigen::VectorXd& grid, const SolverOptions& opts) {
  tmpl.validate(m.d);
  for (int i = 1; i < grid.size(); ++i)
    if (!(grid[i] < grid[i - 1])) throw std::invalid_argument("lambda grid must be strictly decreasing");

  std::vector<FitResult> out;
  out.reserve(grid.size());
  Eigen::VectorXd warm = restricted_fit(m, tmpl, opts).theta;
  for (int i = 0; i < grid.size(); ++i) {
    PenaltySpec pen = tmpl;
    pen.lambda1 = grid[i];
    out.push_back(fit(m, pen, opts, warm));
    warm = out.back().theta;
  }
  return out;
}

double misclassification_rate(const ModelData& eval_model, const Eigen::VectorXd& theta) {
  const auto& in = eval_model.inputs;
  const int n = eval_model.n;
  const bool latent_rule =
      in.cls == ModelClass::interval_regression ||
      (in.cls == ModelClass::survival && in.basis.kind == SurvivalBasisKind::exponential);

  int miss = 0;
  if (latent_rule) {
    const int p = static_cast<int>(in.X.cols());
    Eigen::VectorXd beta;
    if (in.cls == ModelClass::interval_regression && in.scale == ScaleMode::unknown) {
      if (!(theta[0] > 0)) throw numeric_error("misclassification_rate: scale coordinate must be positive");
      beta = theta.tail(p) / theta[0];
    } else {
      beta = theta;
    }
    const Eigen::VectorXd pred = in.X * beta;
    for (int i = 0; i < n; ++i) {
      double lo, hi;
      if (in.cls == ModelClass::survival) {  // latent scale is log time
        lo = in.lower[i].value > 0 ? std::log(in.lower[i].value)
                                   : -std::numeric_limits<double>::infinity();
        hi = in.upper[i].is_finite() ? std::log(in.upper[i].value)
                                     : std::numeric_limits<double>::infinity();
      } else {
        lo = in.lower[i].as_double();
        hi = in.upper[i].as_double();
      }
      if (!(pred[i] >= lo && pred[i] < hi)) ++miss;
    }
  } else if (in.cls == ModelClass::cumulative) {
    const PredictSpec spec = make_predict_spec(eval_model);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd probs = predict_probs(spec, theta, in.X.row(i).transpose());
      int argmax = 0;
      probs.maxCoeff(&argmax);
      if (argmax + 1 != in.category[i]) ++miss;
    }
  } else {
    // survival with non-trivial basis: modal bin on the union grid must sit
    // inside the observed interval
    const PredictSpec spec = make_predict_spec(eval_model);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd probs = predict_probs(spec, theta, in.X.row(i).transpose());
      int argmax = 0;
      probs.maxCoeff(&argmax);
      const double bin_lo = argmax == 0 ? 0.0 : spec.cuts[argmax - 1];
      const double bin_hi = argmax == static_cast<int>(spec.cuts.size())
                                ? std::numeric_limits<double>::infinity()
                                : spec.cuts[argmax];
      const double obs_lo = in.lower[i].value;
      const double obs_hi = in.upper[i].as_double();
      if (!(bin_lo >= obs_lo && bin_hi <= obs_hi)) ++miss;
    }
  }
  return static_cast<double>(miss) / n;
}

CvResult kfold_cv(const ModelData& m, const PenaltySpec& tmpl, const Eigen::VectorXd& grid,
                  int k_folds, std::uint64_t seed, const SolverOptions& opts, int n_threads) {
  tmpl.validate(m.d);
  if (k_folds < 2 || k_folds > m.n) throw std::invalid_argument("k_folds must be in [2, n]");
  if (grid.size() < 1) throw std::invalid_argument("lambda grid is empty");

  CvResult res;
  res.lambdas = grid;
  res.fold_assignments.resize(m.n);
  std::vector<int> perm(m.n);
  std::iota(perm.begin(), perm.end(), 0);
  rng::Rng gen(rng::derive_seed(seed, 0));
  gen.shuffle(perm);
  for (int pos = 0; pos < m.n; ++pos) res.fold_assignments[perm[pos]] = pos % k_folds;

  const int L = static_cast<int>(grid.size());
  Eigen::MatrixXd loss(L, k_folds);
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> valid(L, k_folds);
  valid.setZero();

  auto run_fold = [&](int f) {
    std::vector<int> train, held;
    for (int i = 0; i < m.n; ++i)
      (res.fold_assignments[i] == f ? held : train).push_back(i);
    try {
      const ModelData train_model = subset_observations(m, train);
      const ModelData eval_model = subset_observations(m, held);
      const std::vector<FitResult> fits = fit_path(train_model, tmpl, grid, opts);
      for (int l = 0; l < L; ++l) {
        try {
          loss(l, f) = misclassification_rate(eval_model, fits[l].theta);
          valid(l, f) = 1;
        } catch (const std::exception&) {
          valid(l, f) = 0;
        }
      }
    } catch (const std::exception&) {
      for (int l = 0; l < L; ++l) valid(l, f) = 0;
    }
  };

  int workers = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, k_folds);
  if (workers == 1) {
    for (int f = 0; f < k_folds; ++f) run_fold(f);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int f = next.fetch_add(1); f < k_folds; f = next.fetch_add(1)) run_fold(f);
      });
    for (auto& t : pool) t.join();
  }

  res.mean_loss.resize(L);
  res.se_loss.resize(L);
  for (int l = 0; l < L; ++l) {
    int nv = 0;
    double sum = 0.0;
    for (int f = 0; f < k_folds; ++f)
      if (valid(l, f)) {
        ++nv;
        sum += loss(l, f);
      }
    res.n_failed_cells += k_folds - nv;
    if (nv == 0) {
      res.mean_loss[l] = std::numeric_limits<double>::quiet_NaN();
      res.se_loss[l] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double mean = sum / nv;
    double ss = 0.0;
    for (int f = 0; f < k_folds; ++f)
      if (valid(l, f)) ss += (loss(l, f) - mean) * (loss(l, f) - mean);
    res.mean_loss[l] = mean;
    res.se_loss[l] = nv > 1 ? std::sqrt(ss / (nv - 1) / nv) : 0.0;
  }

  // grid is decreasing, so a strict < keeps the largest lambda on ties
  int best = -1;
  for (int l = 0; l < L; ++l) {
    if (std::isnan(res.mean_loss[l])) continue;
    if (best < 0 || res.mean_loss[l] < res.mean_loss[best]) best = l;
  }
  if (best < 0) throw numeric_error("cross-validation failed on every (lambda, fold) cell");
  res.selected_index = best;
  res.selected_lambda = grid[best];
  return res;
}

}  // namespace finreg
