#include "partisan/pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "partisan/common/csv.hpp"
#include "partisan/common/error.hpp"

namespace partisan::pipeline {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    std::string item = trim(s.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

}  // namespace

FlatConfig parse_flat_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::Io, "config: cannot open " + path.string());
  FlatConfig out;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::string where = path.filename().string() + " line " + std::to_string(line_no);
    if (t.front() == '[') {
      if (t.back() != ']')
        throw Error(ErrorCode::Validation, where + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw Error(ErrorCode::Validation, where + ": empty section name");
      out[section];
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Validation, where + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw Error(ErrorCode::Validation, where + ": empty key");
    if (section.empty())
      throw Error(ErrorCode::Validation, where + ": key outside any section");
    if (!out[section].emplace(key, value).second)
      throw Error(ErrorCode::Validation, where + ": duplicate key " + key);
  }
  return out;
}

std::vector<int> RunConfig::swing_years() const {
  if (swing_window == 2008) return {2008, 2012, 2016, 2020};
  return {2012, 2016, 2020};
}

RunConfig load_run_config(const std::filesystem::path& path) {
  FlatConfig raw = parse_flat_config(path);

  static const std::map<std::string, std::set<std::string>> known = {
      {"inputs", {"counties", "votes", "covariates", "edges_colocation",
                  "edges_friendship", "edges_commuting"}},
      {"analysis", {"election_years", "swing_window", "k_sweep", "exclude_self"}},
      {"elasticnet", {"alphas", "l1_ratios", "folds", "train_ratio", "tol", "max_iter"}},
      {"gbm", {"n_trees", "learning_rate", "max_depth", "background_rows"}},
      {"run", {"seed", "out"}}};
  for (const auto& [section, keys] : raw) {
    auto it = known.find(section);
    if (it == known.end())
      throw Error(ErrorCode::Validation, "config: unknown section [" + section + "]");
    for (const auto& [key, value] : keys)
      if (!it->second.count(key))
        throw Error(ErrorCode::Validation,
                    "config: unknown key " + key + " in [" + section + "]");
  }

  auto get = [&](const std::string& section, const std::string& key) -> const std::string* {
    auto s = raw.find(section);
    if (s == raw.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  };
  auto require = [&](const std::string& section, const std::string& key) -> const std::string& {
    const std::string* v = get(section, key);
    if (!v)
      throw Error(ErrorCode::Validation,
                  "config: missing required key " + key + " in [" + section + "]");
    return *v;
  };
  auto as_double = [&](const std::string& v, const std::string& what) {
    return csv::parse_double(v, "config key " + what);
  };
  auto as_int = [&](const std::string& v, const std::string& what) {
    return static_cast<int>(csv::parse_int(v, "config key " + what));
  };

  RunConfig cfg;
  cfg.config_path = path;
  const std::filesystem::path base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  cfg.counties = resolve(require("inputs", "counties"));
  cfg.votes = resolve(require("inputs", "votes"));
  cfg.covariates = resolve(require("inputs", "covariates"));
  cfg.edges["colocation"] = resolve(require("inputs", "edges_colocation"));
  cfg.edges["friendship"] = resolve(require("inputs", "edges_friendship"));
  if (const std::string* v = get("inputs", "edges_commuting"))
    cfg.edges["commuting"] = resolve(*v);

  if (const std::string* v = get("analysis", "election_years")) {
    cfg.election_years.clear();
    for (const auto& item : split_list(*v))
      cfg.election_years.push_back(as_int(item, "election_years"));
  }
  if (cfg.election_years.empty())
    throw Error(ErrorCode::Validation, "config: election_years must be nonempty");
  if (const std::string* v = get("analysis", "swing_window"))
    cfg.swing_window = as_int(*v, "swing_window");
  if (cfg.swing_window != 2012 && cfg.swing_window != 2008)
    throw Error(ErrorCode::Validation, "config: swing_window must be 2012 or 2008");
  if (const std::string* v = get("analysis", "k_sweep")) {
    cfg.k_sweep.clear();
    for (const auto& item : split_list(*v)) cfg.k_sweep.push_back(as_int(item, "k_sweep"));
  }
  if (cfg.k_sweep.empty())
    throw Error(ErrorCode::Validation, "config: k_sweep must be nonempty");
  for (int k : cfg.k_sweep)
    if (k < 1) throw Error(ErrorCode::Validation, "config: k_sweep entries must be positive");
  if (const std::string* v = get("analysis", "exclude_self")) {
    if (*v == "true")
      cfg.exclude_self = true;
    else if (*v == "false")
      cfg.exclude_self = false;
    else
      throw Error(ErrorCode::Validation, "config: exclude_self must be true or false");
  }

  if (const std::string* v = get("elasticnet", "alphas")) {
    cfg.en_alphas.clear();
    for (const auto& item : split_list(*v)) cfg.en_alphas.push_back(as_double(item, "alphas"));
  }
  if (const std::string* v = get("elasticnet", "l1_ratios")) {
    cfg.en_l1_ratios.clear();
    for (const auto& item : split_list(*v))
      cfg.en_l1_ratios.push_back(as_double(item, "l1_ratios"));
  }
  if (cfg.en_alphas.empty() || cfg.en_l1_ratios.empty())
    throw Error(ErrorCode::Validation, "config: elastic-net grids must be nonempty");
  if (const std::string* v = get("elasticnet", "folds")) cfg.en_folds = as_int(*v, "folds");
  if (cfg.en_folds < 2) throw Error(ErrorCode::Validation, "config: folds must be >= 2");
  if (const std::string* v = get("elasticnet", "train_ratio"))
    cfg.en_train_ratio = as_double(*v, "train_ratio");
  if (!(cfg.en_train_ratio > 0.0 && cfg.en_train_ratio < 1.0))
    throw Error(ErrorCode::Validation, "config: train_ratio must be in (0,1)");
  if (const std::string* v = get("elasticnet", "tol")) cfg.en_tol = as_double(*v, "tol");
  if (const std::string* v = get("elasticnet", "max_iter"))
    cfg.en_max_iter = as_int(*v, "max_iter");

  if (const std::string* v = get("gbm", "n_trees")) cfg.gbm_trees = as_int(*v, "n_trees");
  if (const std::string* v = get("gbm", "learning_rate"))
    cfg.gbm_learning_rate = as_double(*v, "learning_rate");
  if (const std::string* v = get("gbm", "max_depth"))
    cfg.gbm_max_depth = as_int(*v, "max_depth");
  if (cfg.gbm_trees < 0 || cfg.gbm_max_depth < 1)
    throw Error(ErrorCode::Validation, "config: gbm n_trees must be >= 0 and max_depth >= 1");
  if (const std::string* v = get("gbm", "background_rows"))
    cfg.shap_background_rows = as_int(*v, "background_rows");
  if (cfg.shap_background_rows < 1)
    throw Error(ErrorCode::Validation, "config: background_rows must be >= 1");

  if (const std::string* v = get("run", "seed")) {
    long long s = csv::parse_int(*v, "config key seed");
    if (s < 0) throw Error(ErrorCode::Validation, "config: seed must be >= 0");
    cfg.seed = static_cast<uint64_t>(s);
  }
  if (const std::string* v = get("run", "out")) cfg.out = resolve(*v);

  for (const auto& [name, file] : std::map<std::string, std::filesystem::path>{
           {"counties", cfg.counties}, {"votes", cfg.votes}, {"covariates", cfg.covariates}})
    if (!std::filesystem::exists(file))
      throw Error(ErrorCode::Validation, "config: " + name + " file not found: " + file.string());
  for (const auto& [kind, file] : cfg.edges)
    if (!std::filesystem::exists(file))
      throw Error(ErrorCode::Validation,
                  "config: edges_" + kind + " file not found: " + file.string());
  return cfg;
}

}  // namespace partisan::pipeline
