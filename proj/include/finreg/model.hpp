#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "finreg/families.hpp"
#include "finreg/types.hpp"

namespace finreg {

enum class ModelClass : int { interval_regression = 0, cumulative = 1, survival = 2 };
enum class ScaleMode : int { known_one = 0, unknown = 1 };
enum class SurvivalBasisKind : int { exponential = 0, weibull = 1, custom = 2 };

/// Coordinate roles drive defaults elsewhere: scale-type coordinates are
/// Wald-tested against 1, everything else against 0.
enum class ParamRole : int { coefficient = 0, cutpoint = 1, scale = 2, shape = 3 };

/// Elastic-net penalty with per-coordinate L1 weights (0 = unpenalized) and
/// per-coordinate lower bounds (0 or -inf).
struct PenaltySpec {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Eigen::VectorXd l1_weight;    // length d, entries >= 0
  Eigen::VectorXd lower_bound;  // length d, entries 0 or -inf

  void validate(int d) const;
};

/// Monotone basis values for the survival model, supplied as precomputed
/// values of the basis at each observation's log cut points. The library
/// never evaluates spline formulas itself.
struct SurvivalBasis {
  SurvivalBasisKind kind = SurvivalBasisKind::exponential;
  Eigen::MatrixXd at_lower;  // n x q, row i = B(log cut_lower_i); ignored rows may be 0
  Eigen::MatrixXd at_upper;  // n x q
};

/// Raw ingredients a model was built from. Retained so folds can be rebuilt
/// through the same builder, and so prediction grids and losses can work on
/// the original data scale.
struct ModelInputs {
  ModelClass cls = ModelClass::interval_regression;
  ScaleMode scale = ScaleMode::known_one;
  Eigen::MatrixXd X;                 // n x p (p may be 0)
  std::vector<ExtReal> lower, upper; // interval class: latent scale; survival: time scale
  std::vector<int> category;         // cumulative class, values in 1..n_categories
  int n_categories = 0;
  SurvivalBasis basis;
};

/// One observation as the affine map [a_i, b_i]^T = Z_i theta + m_i.
/// Rows of Z are zero and the offset is infinite at infinite endpoints.
struct ObservationBlock {
  Eigen::VectorXd z_a, z_b;
  ExtReal m_a, m_b;
  bool a_infinite = false, b_infinite = false;
};

/// Immutable data + penalty metadata for one model fit.
struct ModelData {
  int n = 0, d = 0;
  Family family = Family::gaussian;
  Eigen::MatrixXd Za, Zb;            // n x d; row i is z_i^a / z_i^b
  Eigen::VectorXd ma, mb;            // finite offsets; entry unused where *_inf is set
  std::vector<std::uint8_t> a_inf, b_inf;
  PenaltySpec penalty_default;
  std::vector<std::string> labels;
  std::vector<ParamRole> roles;
  Eigen::VectorXd theta_init;        // feasible default start for the solvers
  ModelInputs inputs;

  ObservationBlock block(int i) const;
};

/// Interval-censored regression (latent Y* = x'beta + sigma W observed in
/// [lower, upper)). With known sigma = 1 the parameter is beta (d = p); with
/// unknown sigma, theta = [1/sigma, beta/sigma] (d = p + 1) and the first
/// coordinate is bounded below by 0 and exempt from the L1 penalty.
ModelData build_interval_regression(const Eigen::MatrixXd& X,
                                    const std::vector<ExtReal>& lower,
                                    const std::vector<ExtReal>& upper,
                                    ScaleMode scale,
                                    Family family,
                                    std::vector<std::string> names = {});

/// Cumulative probability model with m >= 2 ordered categories and optional
/// predictors: P(Y <= j) = R(theta_j - x'beta). Cutpoints are unpenalized.
ModelData build_cumulative(const std::vector<int>& y,
                           int n_categories,
                           const Eigen::MatrixXd& X,
                           Family family,
                           std::vector<std::string> names = {});

/// Interval-censored parametric survival model on the extreme-value family,
/// F(t) = R(sp(log t; gamma) - x'beta). Basis choices: sp = log t fixed
/// (exponential), sp = gamma log t (weibull), or user-supplied monotone basis
/// values (custom). Shape coordinates are bounded below by 0 and unpenalized.
ModelData build_survival(const std::vector<double>& cut_lower,
                         const std::vector<ExtReal>& cut_upper,
                         const Eigen::MatrixXd& X,
                         const SurvivalBasis& basis,
                         std::vector<std::string> names = {});

/// Rebuilds the model restricted to a subset of observations (CV folds).
ModelData subset_observations(const ModelData& m, const std::vector<int>& idx);

/// Keeps only the given coordinates. Used for fits with frozen coordinates;
/// the result carries no usable raw inputs.
ModelData subset_columns(const ModelData& m, const std::vector<int>& keep);

}  // namespace finreg
