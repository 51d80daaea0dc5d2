#include "finreg/model.hpp"

#include <cmath>

namespace finreg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::string> default_names(int p) {
  std::vector<std::string> out(p);
  for (int j = 0; j < p; ++j) out[j] = "x" + std::to_string(j + 1);
  return out;
}

void check_names(std::vector<std::string>& names, int p) {
  if (names.empty()) names = default_names(p);
  if (static_cast<int>(names.size()) != p)
    throw data_error("predictor name count does not match number of columns");
}

}  // namespace

void PenaltySpec::validate(int d) const {
  if (lambda1 < 0 || lambda2 < 0) throw std::invalid_argument("penalty parameters must be nonnegative");
  if (l1_weight.size() != d || lower_bound.size() != d)
    throw std::invalid_argument("penalty weight/bound vectors must have length d");
  for (int j = 0; j < d; ++j) {
    if (!(l1_weight[j] >= 0)) throw std::invalid_argument("l1 weights must be nonnegative");
    if (!(lower_bound[j] == 0.0 || lower_bound[j] == kNegInf))
      throw std::invalid_argument("lower bounds must be 0 or -inf");
  }
}

ObservationBlock ModelData::block(int i) const {
  ObservationBlock b;
  b.z_a = Za.row(i).transpose();
  b.z_b = Zb.row(i).transpose();
  b.a_infinite = a_inf[i] != 0;
  b.b_infinite = b_inf[i] != 0;
  b.m_a = b.a_infinite ? ExtReal::neg_inf() : ExtReal::finite(ma[i]);
  b.m_b = b.b_infinite ? ExtReal::pos_inf() : ExtReal::finite(mb[i]);
  return b;
}

ModelData build_interval_regression(const Eigen::MatrixXd& X,
                                    const std::vector<ExtReal>& lower,
                                    const std::vector<ExtReal>& upper,
                                    ScaleMode scale,
                                    Family family,
                                    std::vector<std::string> names) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
    throw data_error("interval endpoint vectors must match the number of rows of X");
  check_names(names, p);
  for (int i = 0; i < n; ++i) {
    if (!ext_less(lower[i], upper[i]))
      throw data_error("row " + std::to_string(i + 1) + ": lower endpoint must be < upper endpoint");
  }

  const bool unk = scale == ScaleMode::unknown;
  ModelData m;
  m.n = n;
  m.d = unk ? p + 1 : p;
  m.family = family;
  m.Za = Eigen::MatrixXd::Zero(n, m.d);
  m.Zb = Eigen::MatrixXd::Zero(n, m.d);
  m.ma = Eigen::VectorXd::Zero(n);
  m.mb = Eigen::VectorXd::Zero(n);
  m.a_inf.assign(n, 0);
  m.b_inf.assign(n, 0);

  const int off = unk ? 1 : 0;
  for (int i = 0; i < n; ++i) {
    if (lower[i].is_finite()) {
      m.Za.row(i).segment(off, p) = -X.row(i);
      if (unk) {
        m.Za(i, 0) = lower[i].value;
      } else {
        m.ma[i] = lower[i].value;
      }
    } else {
      m.a_inf[i] = 1;
    }
    if (upper[i].is_finite()) {
      m.Zb.row(i).segment(off, p) = -X.row(i);
      if (unk) {
        m.Zb(i, 0) = upper[i].value;
      } else {
        m.mb[i] = upper[i].value;
      }
    } else {
      m.b_inf[i] = 1;
    }
  }

  m.penalty_default.l1_weight = Eigen::VectorXd::Ones(m.d);
  m.penalty_default.lower_bound = Eigen::VectorXd::Constant(m.d, kNegInf);
  m.roles.assign(m.d, ParamRole::coefficient);
  m.theta_init = Eigen::VectorXd::Zero(m.d);
  if (unk) {
    m.penalty_default.l1_weight[0] = 0.0;
    m.penalty_default.lower_bound[0] = 0.0;
    m.roles[0] = ParamRole::scale;
    m.theta_init[0] = 1.0;  // theta_1 = 1/sigma must be positive for nondegenerate intervals
    m.labels.push_back("inv_scale");
  }
  m.labels.insert(m.labels.end(), names.begin(), names.end());

  m.inputs.cls = ModelClass::interval_regression;
  m.inputs.scale = scale;
  m.inputs.X = X;
  m.inputs.lower = lower;
  m.inputs.upper = upper;
  return m;
}

ModelData build_cumulative(const std::vector<int>& y,
                           int n_categories,
                           const Eigen::MatrixXd& X,
                           Family family,
                           std::vector<std::string> names) {
  const int n = static_cast<int>(y.size());
  const int m_cat = n_categories;
  if (m_cat < 2) throw data_error("cumulative model needs at least 2 categories");
  Eigen::MatrixXd Xm = X;
  if (Xm.size() == 0) Xm = Eigen::MatrixXd::Zero(n, 0);
  if (static_cast<int>(Xm.rows()) != n) throw data_error("predictor rows must match response length");
  const int p = static_cast<int>(Xm.cols());
  check_names(names, p);
  for (int i = 0; i < n; ++i) {
    if (y[i] < 1 || y[i] > m_cat)
      throw data_error("row " + std::to_string(i + 1) + ": category out of range 1.." +
                       std::to_string(m_cat));
  }

  ModelData m;
  m.n = n;
  m.d = (m_cat - 1) + p;
  m.family = family;
  m.Za = Eigen::MatrixXd::Zero(n, m.d);
  m.Zb = Eigen::MatrixXd::Zero(n, m.d);
  m.ma = Eigen::VectorXd::Zero(n);
  m.mb = Eigen::VectorXd::Zero(n);
  m.a_inf.assign(n, 0);
  m.b_inf.assign(n, 0);

  for (int i = 0; i < n; ++i) {
    if (y[i] == 1) {
      m.a_inf[i] = 1;
    } else {
      m.Za(i, y[i] - 2) = 1.0;
      if (p > 0) m.Za.row(i).tail(p) = -Xm.row(i);
    }
    if (y[i] == m_cat) {
      m.b_inf[i] = 1;
    } else {
      m.Zb(i, y[i] - 1) = 1.0;
      if (p > 0) m.Zb.row(i).tail(p) = -Xm.row(i);
    }
  }

  m.penalty_default.l1_weight = Eigen::VectorXd::Ones(m.d);
  m.penalty_default.l1_weight.head(m_cat - 1).setZero();
  m.penalty_default.lower_bound = Eigen::VectorXd::Constant(m.d, kNegInf);
  m.roles.assign(m.d, ParamRole::coefficient);
  m.theta_init = Eigen::VectorXd::Zero(m.d);
  for (int j = 0; j < m_cat - 1; ++j) {
    m.roles[j] = ParamRole::cutpoint;
    m.labels.push_back("cut_" + std::to_string(j + 1));
    // Spread starting cutpoints so all category intervals are nonempty.
    m.theta_init[j] = -2.0 + 4.0 * (j + 1) / m_cat;
  }
  m.labels.insert(m.labels.end(), names.begin(), names.end());

  m.inputs.cls = ModelClass::cumulative;
  m.inputs.X = Xm;
  m.inputs.category = y;
  m.inputs.n_categories = m_cat;
  return m;
}

ModelData build_survival(const std::vector<double>& cut_lower,
                         const std::vector<ExtReal>& cut_upper,
                         const Eigen::MatrixXd& X,
                         const SurvivalBasis& basis,
                         std::vector<std::string> names) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (static_cast<int>(cut_lower.size()) != n || static_cast<int>(cut_upper.size()) != n)
    throw data_error("cut vectors must match the number of rows of X");
  check_names(names, p);

  const bool custom = basis.kind == SurvivalBasisKind::custom;
  const int q = custom ? static_cast<int>(basis.at_lower.cols())
                       : (basis.kind == SurvivalBasisKind::weibull ? 1 : 0);
  if (custom) {
    if (basis.at_lower.rows() != n || basis.at_upper.rows() != n || basis.at_upper.cols() != q || q < 1)
      throw data_error("custom basis matrices must be n x q");
  }

  for (int i = 0; i < n; ++i) {
    const std::string row = "row " + std::to_string(i + 1);
    if (!(cut_lower[i] >= 0)) throw data_error(row + ": negative time");
    if (cut_upper[i].kind == ExtReal::NegInf) throw data_error(row + ": upper cut cannot be -inf");
    if (cut_upper[i].is_finite()) {
      if (!(cut_upper[i].value > 0)) throw data_error(row + ": upper cut must be positive");
      if (!(cut_lower[i] < cut_upper[i].value)) throw data_error(row + ": cuts must satisfy lower < upper");
    }
    if (custom && cut_lower[i] > 0 && cut_upper[i].is_finite()) {
      const auto diff = basis.at_upper.row(i) - basis.at_lower.row(i);
      if (diff.minCoeff() < 0 || !(diff.sum() > 0))
        throw data_error(row + ": basis values must be componentwise nondecreasing in t");
    }
  }

  ModelData m;
  m.n = n;
  m.d = q + p;
  m.family = Family::extreme_value;
  m.Za = Eigen::MatrixXd::Zero(n, m.d);
  m.Zb = Eigen::MatrixXd::Zero(n, m.d);
  m.ma = Eigen::VectorXd::Zero(n);
  m.mb = Eigen::VectorXd::Zero(n);
  m.a_inf.assign(n, 0);
  m.b_inf.assign(n, 0);

  for (int i = 0; i < n; ++i) {
    if (cut_lower[i] > 0) {
      const double lt = std::log(cut_lower[i]);
      switch (basis.kind) {
        case SurvivalBasisKind::exponential: m.ma[i] = lt; break;
        case SurvivalBasisKind::weibull: m.Za(i, 0) = lt; break;
        case SurvivalBasisKind::custom: m.Za.row(i).head(q) = basis.at_lower.row(i); break;
      }
      m.Za.row(i).tail(p) = -X.row(i);
    } else {
      m.a_inf[i] = 1;  // first interval [0, t): log 0 = -inf
    }
    if (cut_upper[i].is_finite()) {
      const double ut = std::log(cut_upper[i].value);
      switch (basis.kind) {
        case SurvivalBasisKind::exponential: m.mb[i] = ut; break;
        case SurvivalBasisKind::weibull: m.Zb(i, 0) = ut; break;
        case SurvivalBasisKind::custom: m.Zb.row(i).head(q) = basis.at_upper.row(i); break;
      }
      m.Zb.row(i).tail(p) = -X.row(i);
    } else {
      m.b_inf[i] = 1;
    }
  }

  m.penalty_default.l1_weight = Eigen::VectorXd::Ones(m.d);
  m.penalty_default.lower_bound = Eigen::VectorXd::Constant(m.d, kNegInf);
  m.roles.assign(m.d, ParamRole::coefficient);
  m.theta_init = Eigen::VectorXd::Zero(m.d);
  for (int j = 0; j < q; ++j) {
    m.penalty_default.l1_weight[j] = 0.0;
    m.penalty_default.lower_bound[j] = 0.0;
    m.theta_init[j] = 1.0;  // gamma = 1 is the exponential special case, always feasible
    if (basis.kind == SurvivalBasisKind::weibull) {
      m.roles[j] = ParamRole::scale;
      m.labels.push_back("gamma");
    } else {
      m.roles[j] = ParamRole::shape;
      m.labels.push_back("gamma_" + std::to_string(j + 1));
    }
  }
  m.labels.insert(m.labels.end(), names.begin(), names.end());

  m.inputs.cls = ModelClass::survival;
  m.inputs.X = X;
  m.inputs.lower.reserve(n);
  m.inputs.upper = cut_upper;
  for (int i = 0; i < n; ++i) m.inputs.lower.push_back(ExtReal::finite(cut_lower[i]));
  m.inputs.basis = basis;
  return m;
}

ModelData subset_observations(const ModelData& m, const std::vector<int>& idx) {
  const int k = static_cast<int>(idx.size());
  if (k == 0) throw std::invalid_argument("subset_observations: empty index set");
  for (int i : idx)
    if (i < 0 || i >= m.n) throw std::invalid_argument("subset_observations: index out of range");

  const auto& in = m.inputs;
  Eigen::MatrixXd X(k, in.X.cols());
  for (int r = 0; r < k; ++r) X.row(r) = in.X.row(idx[r]);

  std::vector<std::string> names;  // keep predictor labels
  const int p = static_cast<int>(in.X.cols());
  names.assign(m.labels.end() - p, m.labels.end());

  switch (in.cls) {
    case ModelClass::interval_regression: {
      std::vector<ExtReal> lo(k), hi(k);
      for (int r = 0; r < k; ++r) {
        lo[r] = in.lower[idx[r]];
        hi[r] = in.upper[idx[r]];
      }
      return build_interval_regression(X, lo, hi, in.scale, m.family, names);
    }
    case ModelClass::cumulative: {
      std::vector<int> y(k);
      for (int r = 0; r < k; ++r) y[r] = in.category[idx[r]];
      return build_cumulative(y, in.n_categories, X, m.family, names);
    }
    case ModelClass::survival: {
      std::vector<double> lo(k);
      std::vector<ExtReal> hi(k);
      SurvivalBasis basis = in.basis;
      if (basis.kind == SurvivalBasisKind::custom) {
        const int q = static_cast<int>(in.basis.at_lower.cols());
        basis.at_lower.resize(k, q);
        basis.at_upper.resize(k, q);
        for (int r = 0; r < k; ++r) {
          basis.at_lower.row(r) = in.basis.at_lower.row(idx[r]);
          basis.at_upper.row(r) = in.basis.at_upper.row(idx[r]);
        }
      }
      for (int r = 0; r < k; ++r) {
        lo[r] = in.lower[idx[r]].value;
        hi[r] = in.upper[idx[r]];
      }
      return build_survival(lo, hi, X, basis, names);
    }
  }
  throw std::logic_error("subset_observations: unknown model class");
}

ModelData subset_columns(const ModelData& m, const std::vector<int>& keep) {
  const int k = static_cast<int>(keep.size());
  ModelData out;
  out.n = m.n;
  out.d = k;
  out.family = m.family;
  out.Za.resize(m.n, k);
  out.Zb.resize(m.n, k);
  out.ma = m.ma;
  out.mb = m.mb;
  out.a_inf = m.a_inf;
  out.b_inf = m.b_inf;
  out.penalty_default.l1_weight.resize(k);
  out.penalty_default.lower_bound.resize(k);
  out.theta_init.resize(k);
  for (int c = 0; c < k; ++c) {
    const int j = keep[c];
    if (j < 0 || j >= m.d) throw std::invalid_argument("subset_columns: index out of range");
    out.Za.col(c) = m.Za.col(j);
    out.Zb.col(c) = m.Zb.col(j);
    out.penalty_default.l1_weight[c] = m.penalty_default.l1_weight[j];
    out.penalty_default.lower_bound[c] = m.penalty_default.lower_bound[j];
    out.theta_init[c] = m.theta_init[j];
    out.labels.push_back(m.labels[j]);
    out.roles.push_back(m.roles[j]);
  }
  out.inputs.cls = m.inputs.cls;
  out.inputs.scale = m.inputs.scale;
  return out;
}

}  // namespace finreg
