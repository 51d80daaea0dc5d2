#include "finreg/simulate.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "finreg/rng.hpp"

namespace finreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Finite censoring edges: 0/±5 boundary with k interior steps of width d,
// k the largest integer with k*d < 5.
int interior_steps(double d) {
  int k = static_cast<int>(std::floor(5.0 / d));
  if (k * d >= 5.0) --k;
  return std::max(k, 0);
}

// Latent-scale edges including the infinite ends.
std::vector<ExtReal> latent_edges(SimSetting setting, double d) {
  const int k = interior_steps(d);
  std::vector<ExtReal> edges;
  if (setting == SimSetting::extreme_value_lowdim) {
    // exp(Y*) binned on {0, d, ..., kd, 5, inf}; log maps 0 to -inf
    edges.push_back(ExtReal::neg_inf());
    for (int j = 1; j <= k; ++j) edges.push_back(ExtReal::finite(std::log(j * d)));
    edges.push_back(ExtReal::finite(std::log(5.0)));
    edges.push_back(ExtReal::pos_inf());
  } else {
    edges.push_back(ExtReal::neg_inf());
    edges.push_back(ExtReal::finite(-5.0));
    for (int j = k; j >= 1; --j) edges.push_back(ExtReal::finite(-j * d));
    edges.push_back(ExtReal::finite(0.0));
    for (int j = 1; j <= k; ++j) edges.push_back(ExtReal::finite(j * d));
    edges.push_back(ExtReal::finite(5.0));
    edges.push_back(ExtReal::pos_inf());
  }
  return edges;
}

double sample_noise(SimSetting setting, rng::Rng& gen) {
  if (setting == SimSetting::gaussian_highdim) return gen.normal();
  // extreme value with CDF 1 - exp(-exp(w)), by inversion
  return std::log(-std::log(gen.uniform()));
}

struct RepOutcome {
  bool ok = false;
  double ssq_lik = 0.0, ssq_naive = 0.0;
  double miss_lik = 0.0, miss_naive = 0.0;
};

double sq_err_nonzero(const Eigen::VectorXd& est, const Eigen::VectorXd& star) {
  double s = 0.0;
  for (int j = 0; j < 3; ++j) s += (est[j] - star[j]) * (est[j] - star[j]);
  return s;
}

// Representative point of an interval for the squared-error comparator;
// infinite bins use the nearest finite cut shifted by half a bin width.
double interval_midpoint(const ExtReal& lo, const ExtReal& hi, double d) {
  if (!lo.is_finite()) return hi.value - 0.5 * d;
  if (!hi.is_finite()) return lo.value + 0.5 * d;
  return 0.5 * (lo.value + hi.value);
}

Eigen::VectorXd lasso_cv_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const SimConfig& cfg, std::uint64_t seed) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const double lmax = (X.transpose() * y).cwiseAbs().maxCoeff() / n;
  Eigen::VectorXd grid(cfg.n_lambda);
  for (int i = 0; i < cfg.n_lambda; ++i)
    grid[i] = cfg.n_lambda == 1
                  ? lmax
                  : std::exp(std::log(lmax) + std::log(cfg.lambda_ratio) * i / (cfg.n_lambda - 1));

  std::vector<int> fold(n);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  rng::Rng gen(seed);
  gen.shuffle(perm);
  for (int pos = 0; pos < n; ++pos) fold[perm[pos]] = pos % cfg.k_folds;

  Eigen::VectorXd cv_mse = Eigen::VectorXd::Zero(cfg.n_lambda);
  for (int f = 0; f < cfg.k_folds; ++f) {
    std::vector<int> tr, te;
    for (int i = 0; i < n; ++i) (fold[i] == f ? te : tr).push_back(i);
    Eigen::MatrixXd Xtr(tr.size(), p), Xte(te.size(), p);
    Eigen::VectorXd ytr(tr.size()), yte(te.size());
    for (size_t r = 0; r < tr.size(); ++r) {
      Xtr.row(r) = X.row(tr[r]);
      ytr[r] = y[tr[r]];
    }
    for (size_t r = 0; r < te.size(); ++r) {
      Xte.row(r) = X.row(te[r]);
      yte[r] = y[te[r]];
    }
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(p);
    for (int l = 0; l < cfg.n_lambda; ++l) {
      warm = lasso_cd(Xtr, ytr, grid[l], warm);
      cv_mse[l] += (yte - Xte * warm).squaredNorm() / te.size() / cfg.k_folds;
    }
  }
  int best = 0;
  for (int l = 1; l < cfg.n_lambda; ++l)
    if (cv_mse[l] < cv_mse[best]) best = l;

  Eigen::VectorXd warm = Eigen::VectorXd::Zero(p);
  for (int l = 0; l <= best; ++l) warm = lasso_cd(X, y, grid[l], warm);
  return warm;
}

}  // namespace

SimSetting sim_setting_from_string(const std::string& s) {
  if (s == "extreme-value-lowdim" || s == "extreme_value_lowdim") return SimSetting::extreme_value_lowdim;
  if (s == "gaussian-highdim" || s == "gaussian_highdim") return SimSetting::gaussian_highdim;
  throw data_error("unknown simulation setting: " + s);
}

const char* sim_setting_name(SimSetting s) {
  return s == SimSetting::extreme_value_lowdim ? "extreme-value-lowdim" : "gaussian-highdim";
}

void SimConfig::validate() const {
  if (setting == SimSetting::extreme_value_lowdim && p != 3)
    throw std::invalid_argument("the low-dimensional setting uses p = 3 (intercept + 2 predictors)");
  if (p < 3) throw std::invalid_argument("p must be >= 3 (three nonzero true coefficients)");
  if (n < 10) throw std::invalid_argument("n must be >= 10");
  if (!(interval_size > 0)) throw std::invalid_argument("interval_size must be positive");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (k_folds < 2) throw std::invalid_argument("k_folds must be >= 2");
  if (n_lambda < 1 || !(lambda_ratio > 0 && lambda_ratio < 1))
    throw std::invalid_argument("bad lambda grid parameters");
}

Eigen::MatrixXd gen_predictors(SimSetting setting, int n, int p, std::uint64_t seed) {
  const bool intercept = setting == SimSetting::extreme_value_lowdim;
  const int q = intercept ? p - 1 : p;  // correlated coordinates
  rng::Rng gen(seed);
  Eigen::MatrixXd W(n, q);
  const double rho = 0.5, tail = std::sqrt(1.0 - rho * rho);
  for (int i = 0; i < n; ++i) {
    double prev = gen.normal();
    W(i, 0) = prev;
    for (int j = 1; j < q; ++j) {
      prev = rho * prev + tail * gen.normal();
      W(i, j) = prev;
    }
  }
  for (int j = 0; j < q; ++j) {
    const double mean = W.col(j).mean();
    W.col(j).array() -= mean;
    const double sd = std::sqrt(W.col(j).squaredNorm() / (n - 1));
    W.col(j) /= sd;
  }
  if (!intercept) return W;
  Eigen::MatrixXd X(n, p);
  X.col(0).setOnes();
  X.rightCols(q) = W;
  return X;
}

Eigen::VectorXd sim_theta_star(int p) {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(p);
  t[0] = 1.0;
  t[1] = 0.5;
  t[2] = -0.5;
  return t;
}

SimIntervals gen_intervals(SimSetting setting, const Eigen::MatrixXd& X,
                           const Eigen::VectorXd& theta_star, double interval_size,
                           std::uint64_t seed) {
  if (theta_star.size() != X.cols()) throw std::invalid_argument("theta_star has wrong length");
  const int n = static_cast<int>(X.rows());
  const std::vector<ExtReal> edges = latent_edges(setting, interval_size);
  rng::Rng gen(seed);

  SimIntervals out;
  out.latent.resize(n);
  out.lower.resize(n);
  out.upper.resize(n);
  const Eigen::VectorXd mean = X * theta_star;
  for (int i = 0; i < n; ++i) {
    const double y = mean[i] + sample_noise(setting, gen);
    out.latent[i] = y;
    size_t j = 0;
    while (j + 2 < edges.size() && !ext_less(ExtReal::finite(y), edges[j + 1])) ++j;
    out.lower[i] = edges[j];
    out.upper[i] = edges[j + 1];
  }
  return out;
}

Eigen::VectorXd glm_gamma_log_irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   int max_iter, double tol) {
  // log link with gamma variance: unit IRLS weights, working response
  // z = eta + (y - mu)/mu
  const int p = static_cast<int>(X.cols());
  Eigen::VectorXd eta = y.array().log();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  const Eigen::LDLT<Eigen::MatrixXd> xtx((X.transpose() * X).eval());
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd mu = eta.array().exp();
    const Eigen::VectorXd z = eta + ((y - mu).array() / mu.array()).matrix();
    const Eigen::VectorXd next = xtx.solve(X.transpose() * z);
    const double change = (next - beta).lpNorm<Eigen::Infinity>();
    beta = next;
    eta = X * beta;
    if (change < tol) break;
  }
  return beta;
}

Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                         const Eigen::VectorXd& warm, int max_iter, double tol) {
  // min (1/2n)||y - Xb||^2 + lambda ||b||_1
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  Eigen::VectorXd beta = warm;
  Eigen::VectorXd resid = y - X * beta;
  Eigen::VectorXd colsq(p);
  for (int j = 0; j < p; ++j) colsq[j] = X.col(j).squaredNorm() / n;
  for (int it = 0; it < max_iter; ++it) {
    double max_step = 0.0;
    for (int j = 0; j < p; ++j) {
      if (colsq[j] <= 0) continue;
      const double rho = X.col(j).dot(resid) / n + colsq[j] * beta[j];
      const double next = soft_threshold(rho, lambda) / colsq[j];
      const double delta = next - beta[j];
      if (delta != 0.0) {
        resid -= delta * X.col(j);
        beta[j] = next;
        max_step = std::max(max_step, std::abs(delta));
      }
    }
    if (max_step < tol) break;
  }
  return beta;
}

SimReport run_experiment(const SimConfig& config) {
  config.validate();
  const Eigen::VectorXd theta_star = sim_theta_star(config.p);
  const Family fam = config.setting == SimSetting::extreme_value_lowdim ? Family::extreme_value
                                                                        : Family::gaussian;

  std::vector<RepOutcome> reps(config.replications);
  auto run_rep = [&](int r) {
    RepOutcome& out = reps[r];
    try {
      const std::uint64_t s0 = rng::derive_seed(config.seed, 4ull * r);
      const std::uint64_t s1 = rng::derive_seed(config.seed, 4ull * r + 1);
      const std::uint64_t s2 = rng::derive_seed(config.seed, 4ull * r + 2);
      const std::uint64_t s3 = rng::derive_seed(config.seed, 4ull * r + 3);

      const Eigen::MatrixXd X = gen_predictors(config.setting, config.n, config.p, s0);
      const SimIntervals iv = gen_intervals(config.setting, X, theta_star, config.interval_size, s1);
      const ModelData model =
          build_interval_regression(X, iv.lower, iv.upper, ScaleMode::known_one, fam);

      Eigen::VectorXd theta_lik;
      if (config.setting == SimSetting::extreme_value_lowdim) {
        theta_lik = fit(model, model.penalty_default).theta;
      } else {
        PenaltySpec tmpl = model.penalty_default;
        const Eigen::VectorXd grid =
            lambda_path(model, tmpl, config.n_lambda, config.lambda_ratio);
        const CvResult cv = kfold_cv(model, tmpl, grid, config.k_folds,
                                     rng::derive_seed(config.seed, 1000003ull + r), {}, 1);
        tmpl.lambda1 = cv.selected_lambda;
        theta_lik = fit(model, tmpl).theta;
      }

      Eigen::VectorXd beta_naive;
      if (config.setting == SimSetting::extreme_value_lowdim) {
        // gamma GLM on the exp-scale upper endpoints (5 + d for the open bin)
        Eigen::VectorXd u(config.n);
        for (int i = 0; i < config.n; ++i)
          u[i] = iv.upper[i].is_finite() ? std::exp(iv.upper[i].value)
                                         : 5.0 + config.interval_size;
        beta_naive = glm_gamma_log_irls(X, u);
      } else {
        Eigen::VectorXd mid(config.n);
        for (int i = 0; i < config.n; ++i)
          mid[i] = interval_midpoint(iv.lower[i], iv.upper[i], config.interval_size);
        beta_naive = lasso_cv_fit(X, mid, config, rng::derive_seed(config.seed, 2000003ull + r));
      }

      out.ssq_lik = sq_err_nonzero(theta_lik, theta_star);
      out.ssq_naive = sq_err_nonzero(beta_naive, theta_star);

      const Eigen::MatrixXd Xte = gen_predictors(config.setting, config.n, config.p, s2);
      const SimIntervals ivte =
          gen_intervals(config.setting, Xte, theta_star, config.interval_size, s3);
      const ModelData eval_model =
          build_interval_regression(Xte, ivte.lower, ivte.upper, ScaleMode::known_one, fam);
      out.miss_lik = misclassification_rate(eval_model, theta_lik);
      out.miss_naive = misclassification_rate(eval_model, beta_naive);
      out.ok = true;
    } catch (const std::exception&) {
      out.ok = false;
    }
  };

  int workers = config.n_threads > 0 ? config.n_threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, config.replications);
  if (workers == 1) {
    for (int r = 0; r < config.replications; ++r) run_rep(r);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < config.replications; r = next.fetch_add(1)) run_rep(r);
      });
    for (auto& t : pool) t.join();
  }

  SimReport rep;
  rep.config = config;
  std::vector<double> sl, sn, ml, mn;
  for (const auto& r : reps) {
    if (!r.ok) {
      ++rep.n_failed;
      continue;
    }
    sl.push_back(r.ssq_lik);
    sn.push_back(r.ssq_naive);
    ml.push_back(r.miss_lik);
    mn.push_back(r.miss_naive);
  }
  if (sl.empty()) throw numeric_error("every simulation replication failed");

  const auto summarize = [](const std::vector<double>& ssq, const std::vector<double>& miss,
                            MethodReport& m) {
    const double k = static_cast<double>(ssq.size());
    double sum = 0.0, msum = 0.0;
    for (double v : ssq) sum += v;
    for (double v : miss) msum += v;
    m.sse_nonzero = sum;
    m.mean_misclass = msum / k;
    double ssd = 0.0, msd = 0.0;
    for (double v : ssq) ssd += (v - sum / k) * (v - sum / k);
    for (double v : miss) msd += (v - m.mean_misclass) * (v - m.mean_misclass);
    // SSE is a sum of k iid terms: SE = sqrt(k) * sd(term)
    m.sse_se = k > 1 ? std::sqrt(k * ssd / (k - 1)) : 0.0;
    m.misclass_se = k > 1 ? std::sqrt(msd / (k - 1) / k) : 0.0;
  };
  summarize(sl, ml, rep.likelihood);
  summarize(sn, mn, rep.naive);
  return rep;
}

std::string sim_report_json(const SimReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["setting"] = sim_setting_name(r.config.setting);
  j["n"] = r.config.n;
  j["p"] = r.config.p;
  j["interval_size"] = r.config.interval_size;
  j["replications"] = r.config.replications;
  j["seed"] = r.config.seed;
  j["failed_replications"] = r.n_failed;
  for (const auto& [name, m] :
       {std::pair<const char*, const MethodReport*>{"likelihood", &r.likelihood},
        std::pair<const char*, const MethodReport*>{"naive", &r.naive}}) {
    j[name] = {{"sse_nonzero", m->sse_nonzero},
               {"sse_se", m->sse_se},
               {"mean_misclass", m->mean_misclass},
               {"misclass_se", m->misclass_se}};
  }
  return j.dump(2);
}

std::string sim_report_csv(const SimReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "setting,n,p,interval_size,replications,method,sse_nonzero,sse_se,mean_misclass,"
        "misclass_se\n";
  for (const auto& [name, m] :
       {std::pair<const char*, const MethodReport*>{"likelihood", &r.likelihood},
        std::pair<const char*, const MethodReport*>{"naive", &r.naive}}) {
    os << sim_setting_name(r.config.setting) << ',' << r.config.n << ',' << r.config.p << ','
       << r.config.interval_size << ',' << r.config.replications << ',' << name << ','
       << m->sse_nonzero << ',' << m->sse_se << ',' << m->mean_misclass << ',' << m->misclass_se
       << '\n';
  }
  return os.str();
}

std::string sim_report_tidy_header() { return "setting,interval_size,method,metric,value,mc_se\n"; }

std::string sim_report_tidy_rows(const SimReport& r) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& [name, m] :
       {std::pair<const char*, const MethodReport*>{"likelihood", &r.likelihood},
        std::pair<const char*, const MethodReport*>{"naive", &r.naive}}) {
    os << sim_setting_name(r.config.setting) << ',' << r.config.interval_size << ',' << name
       << ",sse_nonzero," << m->sse_nonzero << ',' << m->sse_se << '\n';
    os << sim_setting_name(r.config.setting) << ',' << r.config.interval_size << ',' << name
       << ",mean_misclass," << m->mean_misclass << ',' << m->misclass_se << '\n';
  }
  return os.str();
}

}  // namespace finreg
