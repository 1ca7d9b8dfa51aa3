#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace partisan::pipeline {

// Flat sectioned key-value file: [section] headers, key = value lines,
// # comments. Returned as section -> key -> raw string.
using FlatConfig = std::map<std::string, std::map<std::string, std::string>>;
FlatConfig parse_flat_config(const std::filesystem::path& path);

struct RunConfig {
  std::filesystem::path config_path;
  std::filesystem::path counties;
  std::filesystem::path votes;
  std::filesystem::path covariates;
  // network kind -> edge file; colocation and friendship required, commuting
  // optional
  std::map<std::string, std::filesystem::path> edges;

  std::vector<int> election_years{2012, 2016, 2020};
  int swing_window = 2012;  // 2012 or 2008
  std::vector<int> k_sweep{5, 7, 10};
  bool exclude_self = false;

  std::vector<double> en_alphas{1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<double> en_l1_ratios{0.1, 0.5, 0.9};
  int en_folds = 5;
  double en_train_ratio = 0.7;
  double en_tol = 1e-9;
  int en_max_iter = 100000;

  int gbm_trees = 300;
  double gbm_learning_rate = 0.1;
  int gbm_max_depth = 3;
  int shap_background_rows = 128;

  uint64_t seed = 0;
  std::filesystem::path out = "out";

  std::vector<int> swing_years() const;  // window expanded to the year list
};

// Parses and validates; relative paths resolve against the config directory.
// Referenced input files must exist.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace partisan::pipeline
