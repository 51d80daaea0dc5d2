#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "finreg/solver.hpp"

namespace finreg {

/// -hess(loglik) at theta_hat, i.e. n * hess(G_n). Positive semidefinite.
Eigen::MatrixXd observed_information(const ModelData& m, const Eigen::VectorXd& theta_hat);

/// Standard normal upper tail P(Z > z) and chi-square upper tail.
double normal_sf(double z);
double chisq_sf(double x, int df);

struct InferenceTable {
  Eigen::VectorXd estimates, std_errors, z_values, p_values;
  double loglik = 0.0;
  double bic = 0.0;
  std::vector<std::string> labels;
  bool info_ok = true;  // false: information singular, SEs reported as NaN
  int info_rank = 0;
};

/// Wald table from an unpenalized fit: SEs from the inverse observed
/// information, two-sided normal p-values. Default null is 0 per coordinate
/// except scale-type coordinates, which are tested against 1. A singular
/// information matrix yields NaN SEs plus a rank diagnostic instead of a
/// silent pseudo-inverse.
InferenceTable wald_table(const ModelData& m, const FitResult& fit,
                          const std::optional<Eigen::VectorXd>& null_values = std::nullopt);

struct LrtResult {
  double stat = 0.0;
  int df = 0;
  double p = 1.0;
};

/// Likelihood ratio test of nested unpenalized fits.
LrtResult lrt(const FitResult& fit_small, const FitResult& fit_large, int df);

/// d_free * log(n) - 2 * loglik.
double bic(const FitResult& fit, int n, int d_free);

/// Everything needed to evaluate category probabilities at a new predictor
/// vector: the model class plus a grid of cuts tiling the support.
struct PredictSpec {
  ModelClass cls = ModelClass::interval_regression;
  ScaleMode scale = ScaleMode::known_one;
  Family family = Family::gaussian;
  int p = 0;
  int n_categories = 0;          // cumulative class
  std::vector<double> cuts;      // interval: latent cuts; survival: positive time cuts
  SurvivalBasisKind basis_kind = SurvivalBasisKind::exponential;
  Eigen::MatrixXd basis_at_cuts; // custom survival basis, one row per entry of cuts
};

/// Default spec for a fitted model; the grid is the union of the finite cuts
/// observed in the training data.
PredictSpec make_predict_spec(const ModelData& m);

/// Category probabilities at predictor x; nonnegative and summing to 1.
Eigen::VectorXd predict_probs(const PredictSpec& spec, const Eigen::VectorXd& theta,
                              const Eigen::VectorXd& x);

}  // namespace finreg
