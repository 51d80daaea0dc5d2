#pragma once

#include <string>
#include <vector>

#include "finreg/inference.hpp"

namespace finreg {

/// Parsed CSV input. Columns named `lower`/`upper` hold interval endpoints;
/// the tokens `inf`, `-inf`, `+inf` (case-insensitive) and empty cells denote
/// infinite endpoints (empty lower -> -inf, empty upper -> +inf). A `category`
/// column switches the file to cumulative-model form. All remaining numeric
/// columns are predictors.
struct Dataset {
  std::vector<ExtReal> lower, upper;
  std::vector<int> category;
  bool has_category = false;
  bool has_intervals = false;
  Eigen::MatrixXd X;
  std::vector<std::string> column_names;  // predictor names in file order
  int n = 0;
};

Dataset parse_dataset(const std::string& path);
Dataset parse_dataset_text(const std::string& text, const std::string& origin = "<memory>");

/// Everything a saved fit needs to predict later: the prediction spec, the
/// coefficient vector, labels, and solver diagnostics. Doubles survive the
/// JSON round trip bit-exactly.
struct SavedFit {
  PredictSpec spec;
  Eigen::VectorXd theta;
  std::vector<std::string> labels;
  std::vector<std::string> predictor_names;
  FitResult diagnostics;
};

std::string fit_to_json(const SavedFit& sf);
SavedFit fit_from_json(const std::string& text);
void save_fit(const std::string& path, const SavedFit& sf);
SavedFit load_fit(const std::string& path);

}  // namespace finreg
