#include "finreg/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace finreg {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower_copy(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& tok, int row, const std::string& col) {
  try {
    size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw data_error("row " + std::to_string(row) + ", column '" + col +
                     "': cannot parse number from '" + tok + "'");
  }
}

ExtReal parse_endpoint(const std::string& tok, bool is_lower, int row, const std::string& col) {
  if (tok.empty()) return is_lower ? ExtReal::neg_inf() : ExtReal::pos_inf();
  const std::string t = lower_copy(tok);
  if (t == "inf" || t == "+inf" || t == "infinity") return ExtReal::pos_inf();
  if (t == "-inf" || t == "-infinity") return ExtReal::neg_inf();
  return ExtReal::finite(parse_number(tok, row, col));
}

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& a) {
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

}  // namespace

Dataset parse_dataset_text(const std::string& text, const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw data_error(origin + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);

  int lower_col = -1, upper_col = -1, cat_col = -1;
  std::vector<int> pred_cols;
  std::vector<std::string> pred_names;
  for (size_t c = 0; c < header.size(); ++c) {
    const std::string name = lower_copy(header[c]);
    if (name == "lower") {
      lower_col = static_cast<int>(c);
    } else if (name == "upper") {
      upper_col = static_cast<int>(c);
    } else if (name == "category") {
      cat_col = static_cast<int>(c);
    } else {
      pred_cols.push_back(static_cast<int>(c));
      pred_names.push_back(header[c]);
    }
  }
  const bool has_cat = cat_col >= 0;
  const bool has_iv = lower_col >= 0 && upper_col >= 0;
  if (!has_cat && !has_iv)
    throw data_error(origin + ": header must contain 'lower' and 'upper' columns, or 'category'");

  Dataset ds;
  ds.has_category = has_cat;
  ds.has_intervals = has_iv;
  ds.column_names = pred_names;

  std::vector<std::vector<double>> pred_rows;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw data_error(origin + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    if (has_iv) {
      const ExtReal lo = parse_endpoint(cells[lower_col], true, row, "lower");
      const ExtReal hi = parse_endpoint(cells[upper_col], false, row, "upper");
      if (!ext_less(lo, hi))
        throw data_error(origin + ": row " + std::to_string(row) + ": lower >= upper");
      ds.lower.push_back(lo);
      ds.upper.push_back(hi);
    }
    if (has_cat) {
      const double v = parse_number(cells[cat_col], row, "category");
      const int cat = static_cast<int>(v);
      if (cat != v || cat < 1)
        throw data_error(origin + ": row " + std::to_string(row) +
                         ": category must be a positive integer");
      ds.category.push_back(cat);
    }
    std::vector<double> pr;
    pr.reserve(pred_cols.size());
    for (size_t k = 0; k < pred_cols.size(); ++k)
      pr.push_back(parse_number(cells[pred_cols[k]], row, pred_names[k]));
    pred_rows.push_back(std::move(pr));
  }

  ds.n = static_cast<int>(pred_rows.size());
  if (ds.n == 0) throw data_error(origin + ": no data rows");
  ds.X.resize(ds.n, static_cast<int>(pred_cols.size()));
  for (int i = 0; i < ds.n; ++i)
    for (size_t j = 0; j < pred_cols.size(); ++j) ds.X(i, j) = pred_rows[i][j];
  return ds;
}

Dataset parse_dataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw data_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_dataset_text(buf.str(), path);
}

std::string fit_to_json(const SavedFit& sf) {
  nlohmann::json j;
  j["schema_version"] = 1;
  nlohmann::json model;
  switch (sf.spec.cls) {
    case ModelClass::interval_regression: model["class"] = "interval"; break;
    case ModelClass::cumulative: model["class"] = "cumulative"; break;
    case ModelClass::survival: model["class"] = "survival"; break;
  }
  model["family"] = family_name(sf.spec.family);
  model["scale"] = sf.spec.scale == ScaleMode::unknown ? "unknown" : "known";
  model["p"] = sf.spec.p;
  model["n_categories"] = sf.spec.n_categories;
  model["cuts"] = sf.spec.cuts;
  switch (sf.spec.basis_kind) {
    case SurvivalBasisKind::exponential: model["basis"] = "exponential"; break;
    case SurvivalBasisKind::weibull: model["basis"] = "weibull"; break;
    case SurvivalBasisKind::custom: model["basis"] = "custom"; break;
  }
  if (sf.spec.basis_kind == SurvivalBasisKind::custom) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < sf.spec.basis_at_cuts.rows(); ++r)
      rows.push_back(vec_to_json(sf.spec.basis_at_cuts.row(r).transpose()));
    model["basis_at_cuts"] = rows;
  }
  model["predictors"] = sf.predictor_names;
  j["model"] = model;
  j["theta"] = vec_to_json(sf.theta);
  j["labels"] = sf.labels;
  j["diagnostics"] = {{"objective", sf.diagnostics.objective},
                      {"neg_loglik", sf.diagnostics.neg_loglik},
                      {"j_norm", sf.diagnostics.j_norm},
                      {"outer_iters", sf.diagnostics.outer_iters},
                      {"total_inner_iters", sf.diagnostics.total_inner_iters},
                      {"converged", sf.diagnostics.converged},
                      {"lambda1", sf.diagnostics.lambda1},
                      {"lambda2", sf.diagnostics.lambda2}};
  return j.dump(2);
}

SavedFit fit_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw data_error(std::string("fit file is not valid JSON: ") + e.what());
  }
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
    throw data_error("unsupported fit file schema version");

  SavedFit sf;
  const auto& model = j.at("model");
  const std::string cls = model.at("class").get<std::string>();
  if (cls == "interval") sf.spec.cls = ModelClass::interval_regression;
  else if (cls == "cumulative") sf.spec.cls = ModelClass::cumulative;
  else if (cls == "survival") sf.spec.cls = ModelClass::survival;
  else throw data_error("unknown model class in fit file: " + cls);
  sf.spec.family = family_from_string(model.at("family").get<std::string>());
  sf.spec.scale = model.at("scale").get<std::string>() == "unknown" ? ScaleMode::unknown
                                                                    : ScaleMode::known_one;
  sf.spec.p = model.at("p").get<int>();
  sf.spec.n_categories = model.at("n_categories").get<int>();
  sf.spec.cuts = model.at("cuts").get<std::vector<double>>();
  const std::string basis = model.at("basis").get<std::string>();
  if (basis == "exponential") sf.spec.basis_kind = SurvivalBasisKind::exponential;
  else if (basis == "weibull") sf.spec.basis_kind = SurvivalBasisKind::weibull;
  else sf.spec.basis_kind = SurvivalBasisKind::custom;
  if (sf.spec.basis_kind == SurvivalBasisKind::custom) {
    const auto& rows = model.at("basis_at_cuts");
    sf.spec.basis_at_cuts.resize(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (size_t r = 0; r < rows.size(); ++r)
      sf.spec.basis_at_cuts.row(r) = vec_from_json(rows[r]).transpose();
  }
  sf.predictor_names = model.at("predictors").get<std::vector<std::string>>();
  sf.theta = vec_from_json(j.at("theta"));
  sf.labels = j.at("labels").get<std::vector<std::string>>();
  const auto& diag = j.at("diagnostics");
  sf.diagnostics.objective = diag.at("objective").get<double>();
  sf.diagnostics.neg_loglik = diag.at("neg_loglik").get<double>();
  sf.diagnostics.j_norm = diag.at("j_norm").get<double>();
  sf.diagnostics.outer_iters = diag.at("outer_iters").get<int>();
  sf.diagnostics.total_inner_iters = diag.at("total_inner_iters").get<long>();
  sf.diagnostics.converged = diag.at("converged").get<bool>();
  sf.diagnostics.lambda1 = diag.at("lambda1").get<double>();
  sf.diagnostics.lambda2 = diag.at("lambda2").get<double>();
  sf.diagnostics.theta = sf.theta;
  return sf;
}

void save_fit(const std::string& path, const SavedFit& sf) {
  std::ofstream f(path);
  if (!f) throw data_error("cannot write file: " + path);
  f << fit_to_json(sf) << '\n';
}

SavedFit load_fit(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw data_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return fit_from_json(buf.str());
}

}  // namespace finreg
