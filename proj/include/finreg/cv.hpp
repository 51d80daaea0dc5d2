#pragma once

#include <cstdint>

#include "finreg/inference.hpp"
#include "finreg/solver.hpp"

namespace finreg {

/// Fit with the L1-penalized coordinates held at zero; other coordinates are
/// optimized under the template's ridge penalty. Head of every lambda path.
FitResult restricted_fit(const ModelData& m, const PenaltySpec& tmpl,
                         const SolverOptions& opts = {});

/// Smallest lambda1 at which all penalized coordinates are zero:
/// max_j |grad_j G_n(theta_restricted)| / w_j over penalized coordinates.
double lambda_max(const ModelData& m, const PenaltySpec& tmpl, const SolverOptions& opts = {});

/// Log-spaced grid from lambda_max down to lambda_max * ratio.
Eigen::VectorXd lambda_path(const ModelData& m, const PenaltySpec& tmpl, int n_lambda,
                            double ratio, const SolverOptions& opts = {});

/// Fits along a decreasing grid, warm-started from the restricted fit and then
/// from each previous solution.
std::vector<FitResult> fit_path(const ModelData& m, const PenaltySpec& tmpl,
                                const Eigen::VectorXd& grid, const SolverOptions& opts = {});

/// Out-of-sample loss on a held-out model. Interval-regression models (and the
/// exponential survival model, which has the same block shape) use the
/// fraction of observations whose predicted latent location x'beta falls
/// outside the observed interval. Other classes fall back to modal-category
/// mismatch on the model's cut grid.
double misclassification_rate(const ModelData& eval_model, const Eigen::VectorXd& theta);

struct CvResult {
  Eigen::VectorXd lambdas;
  Eigen::VectorXd mean_loss, se_loss;
  std::vector<int> fold_assignments;  // fold index per original observation
  double selected_lambda = 0.0;
  int selected_index = 0;
  long n_failed_cells = 0;
};

/// Seeded K-fold cross-validation along a lambda grid with warm starts.
/// Ties in the mean loss select the largest lambda. Folds run concurrently;
/// results are independent of the thread count.
CvResult kfold_cv(const ModelData& m, const PenaltySpec& tmpl, const Eigen::VectorXd& grid,
                  int k_folds, std::uint64_t seed, const SolverOptions& opts = {},
                  int n_threads = 0);

}  // namespace finreg
