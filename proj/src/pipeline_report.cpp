#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "partisan/common/csv.hpp"
#include "partisan/common/error.hpp"
#include "partisan/exposure/exposure.hpp"
#include "partisan/pipeline/run.hpp"
#include "partisan/stats/tests.hpp"
#include "pipeline_io.hpp"

namespace partisan::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string fmt_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

std::string pad(const std::string& s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Rows as objects keyed by header; values stay raw strings so the summary is
// byte-stable.
json csv_as_json(const fs::path& path) {
  auto t = csv::read_file(path);
  json arr = json::array();
  for (const auto& row : t.rows) {
    json o;
    for (size_t c = 0; c < t.header.size(); ++c) o[t.header[c]] = row[c];
    arr.push_back(o);
  }
  return arr;
}

}  // namespace

void emit_report(const fs::path& run_dir, core::LogFn log) {
  auto manifest_path = run_dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw Error(ErrorCode::IncompleteRun, "manifest");
  json manifest = detail::read_json(manifest_path);
  if (manifest.value("status", std::string()) != "completed") {
    std::string stage = "unknown";
    if (manifest.contains("failed_stage") && manifest["failed_stage"].is_string())
      stage = manifest["failed_stage"].get<std::string>();
    throw Error(ErrorCode::IncompleteRun, stage);
  }

  std::set<std::string> stages_seen;
  for (const auto& s : manifest.at("stages")) {
    auto name = s.at("name").get<std::string>();
    stages_seen.insert(name);
    for (const auto& a : s.at("artifacts"))
      if (!fs::exists(run_dir / a.get<std::string>()))
        throw Error(ErrorCode::IncompleteRun, name);
  }
  for (const auto& name : stage_names())
    if (!stages_seen.count(name)) throw Error(ErrorCode::IncompleteRun, name);

  bool has_commuting = manifest.at("config").at("edges").contains("commuting");
  std::vector<std::string> dims_all = kCoreDimensions;
  if (has_commuting) dims_all.push_back("commuting");
  std::vector<int> ks;
  for (const auto& k : manifest.at("config").at("k_sweep")) {
    int v = k.get<int>();
    if (std::find(ks.begin(), ks.end(), v) == ks.end()) ks.push_back(v);
  }

  std::map<std::string, json> cache;
  auto load = [&](const std::string& name) -> const json& {
    auto it = cache.find(name);
    if (it == cache.end())
      it = cache.emplace(name, detail::read_json(run_dir / name)).first;
    return it->second;
  };

  json summary;
  summary["counties_used"] = manifest.at("counties_used");
  summary["config_hash"] = manifest.at("config_hash");
  summary["seed"] = manifest.at("seed");

  // Per-scope model columns from the OLS fits, plus the R^2 plot data.
  json models = json::array();
  csv::Writer plot_r2({"scope", "dimension", "party", "r2", "n"});
  for (const auto& scope : kScopes) {
    json columns = json::array();
    for (const auto& dim : kCoreDimensions)
      for (const auto& party : kParties) {
        const json& f = load("fit_ols_" + party + "_" + dim + "_" + scope + ".json");
        const auto& slope = f.at("coefficients").at(1);
        columns.push_back({{"dimension", dim},
                           {"party", party},
                           {"coefficient", slope.at("estimate")},
                           {"p", slope.at("p")},
                           {"r2", f.at("r2")},
                           {"aic", f.at("aic")},
                           {"n", f.at("n")}});
      }
    models.push_back({{"scope", scope}, {"columns", columns}});
    for (const auto& dim : dims_all)
      for (const auto& party : kParties) {
        const json& f = load("fit_ols_" + party + "_" + dim + "_" + scope + ".json");
        plot_r2.add_row();
        plot_r2.cell(scope);
        plot_r2.cell(dim);
        plot_r2.cell(party);
        plot_r2.cell(f.at("r2").get<double>());
        plot_r2.cell(f.at("n").get<int>());
      }
  }
  summary["models"] = models;

  json sar = json::array();
  for (const auto& dim : dims_all)
    for (const auto& party : kParties)
      for (int k : ks) {
        const json& f = load("fit_sar_" + party + "_" + dim + "_k" + std::to_string(k) +
                             ".json");
        sar.push_back({{"dimension", dim},
                       {"party", party},
                       {"k", k},
                       {"rho", f.at("rho")},
                       {"rho_p", f.at("rho_p")},
                       {"r2", f.at("r2")}});
      }
  summary["sar"] = sar;

  // Dominance rows; values kept verbatim from the stage CSVs.
  json dominance = json::array();
  csv::Writer plot_dominance({"party", "scope", "predictor", "total", "percent"});
  std::vector<std::string> dominance_variants = kScopes;
  if (has_commuting) dominance_variants.push_back("commuting");
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> percent_all;
  for (const auto& party : kParties)
    for (const auto& variant : dominance_variants) {
      auto t = csv::read_file(run_dir / ("dominance_" + party + "_" + variant + ".csv"));
      auto c_pred = static_cast<size_t>(t.require_column("predictor"));
      auto c_total = static_cast<size_t>(t.require_column("total"));
      auto c_pct = static_cast<size_t>(t.require_column("percent"));
      for (const auto& row : t.rows) {
        dominance.push_back({{"party", party},
                             {"scope", variant},
                             {"predictor", row[c_pred]},
                             {"total", row[c_total]},
                             {"percent", row[c_pct]}});
        plot_dominance.add_row();
        plot_dominance.cell(party);
        plot_dominance.cell(variant);
        plot_dominance.cell(row[c_pred]);
        plot_dominance.cell(row[c_total]);
        plot_dominance.cell(row[c_pct]);
        if (variant == "all") percent_all[party].push_back({row[c_pred], row[c_pct]});
      }
    }
  summary["dominance"] = dominance;

  // Segregation distributions with population weights.
  std::map<std::string, double> population;
  std::map<std::string, std::string> population_raw;
  {
    auto t = csv::read_file(run_dir / "normal_vote.csv");
    auto c_fips = static_cast<size_t>(t.require_column("fips"));
    auto c_pop = static_cast<size_t>(t.require_column("population"));
    for (const auto& row : t.rows) {
      population[row[c_fips]] = csv::parse_double(row[c_pop], "normal_vote.csv");
      population_raw[row[c_fips]] = row[c_pop];
    }
  }
  std::map<std::string, exposure::ExposureTable> tables;
  for (const auto& dim : dims_all)
    tables.emplace(dim, exposure::read_exposure_csv(run_dir / ("exposure_" + dim + ".csv")));

  json segregation = json::object();
  for (const auto& dim : dims_all) {
    const auto& table = tables.at(dim);
    csv::Writer w({"fips", "segregation", "population"});
    double sum = 0.0, weighted = 0.0, weight_total = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < table.size(); ++i) {
      auto it = population.find(table.fips[i]);
      if (it == population.end())
        throw Error(ErrorCode::Validation, "exposure_" + dim + ".csv county " +
                                               table.fips[i] +
                                               " missing from normal_vote.csv");
      w.add_row();
      w.cell(table.fips[i]);
      w.cell(table.segregation[i]);
      w.cell(population_raw.at(table.fips[i]));
      double s = table.segregation[i];
      sum += s;
      weighted += s * it->second;
      weight_total += it->second;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    w.write(run_dir / ("plot_segregation_" + dim + ".csv"));
    segregation[dim] = {
        {"mean", table.size() ? sum / static_cast<double>(table.size()) : 0.0},
        {"population_weighted_mean", weight_total > 0.0 ? weighted / weight_total : 0.0},
        {"min", lo},
        {"max", hi}};
  }
  summary["segregation"] = segregation;

  json structure = json::object();
  for (const auto& dim : dims_all) {
    if (dim == "residential") continue;
    const auto& table = tables.at(dim);
    structure[dim] = {{"diversity_mean", mean_of(table.diversity)},
                      {"extroversion_median", median_of(table.extroversion)}};
  }
  summary["network_structure"] = structure;

  json shap = json::object();
  json gbm = json::object();
  for (const auto& dim : kCoreDimensions) {
    auto t = csv::read_file(run_dir / ("shap_impact_" + dim + ".csv"));
    auto c_feature = static_cast<size_t>(t.require_column("feature"));
    auto c_impact = static_cast<size_t>(t.require_column("mean_abs_impact"));
    json arr = json::array();
    for (const auto& row : t.rows)
      arr.push_back({{"feature", row[c_feature]}, {"mean_abs_impact", row[c_impact]}});
    shap[dim] = arr;
    const json& g = load("gbm_" + dim + ".json");
    gbm[dim] = {{"train_r2", g.at("train_r2")},
                {"test_r2", g.at("test_r2")},
                {"n_train", g.at("n_train")},
                {"n_test", g.at("n_test")}};
  }
  summary["shap_impact"] = shap;
  summary["gbm"] = gbm;

  json elasticnet = json::object();
  for (const auto& party : kParties) {
    const json& e = load("elasticnet_" + party + ".json");
    elasticnet[party] = {{"best_alpha", e.at("best_alpha")},
                        {"best_l1_ratio", e.at("best_l1_ratio")},
                        {"train_r2", e.at("train_r2")},
                        {"test_r2", e.at("test_r2")},
                        {"betas", e.at("betas")}};
  }
  summary["elasticnet"] = elasticnet;

  json tests = json::object();
  tests["dimensions"] = csv_as_json(run_dir / "tests_dimensions.csv");
  tests["dimensions_metro"] = csv_as_json(run_dir / "tests_dimensions_metro.csv");
  tests["dimensions_nonmetro"] = csv_as_json(run_dir / "tests_dimensions_nonmetro.csv");
  tests["metro_nonmetro"] = csv_as_json(run_dir / "tests_metro_nonmetro.csv");
  tests["segregation"] = csv_as_json(run_dir / "tests_segregation.csv");
  if (has_commuting) tests["commuting"] = csv_as_json(run_dir / "tests_commuting.csv");
  summary["tests"] = tests;

  detail::write_json(run_dir / "summary.json", summary);
  plot_r2.write(run_dir / "plot_r2.csv");
  plot_dominance.write(run_dir / "plot_dominance.csv");

  // Human-readable companion.
  std::string r;
  r += "partisan county network analytics\n";
  r += "=================================\n\n";
  r += "counties: " + std::to_string(manifest.at("counties_used").get<int>()) +
       "   seed: " + std::to_string(manifest.at("seed").get<uint64_t>()) +
       "   config: " + manifest.at("config_hash").get<std::string>() + "\n\n";

  r += "exposure means by dimension\n";
  r += "  " + pad("dimension", 14) + pad("pe_dem", 11) + pad("pe_rep", 11) +
       "segregation\n";
  for (const auto& dim : dims_all) {
    const auto& t = tables.at(dim);
    r += "  " + pad(dim, 14) + pad(fmt(mean_of(t.pe_dem)), 11) +
         pad(fmt(mean_of(t.pe_rep)), 11) + fmt(mean_of(t.segregation)) + "\n";
  }
  r += "\n";

  r += "network structure\n";
  r += "  " + pad("dimension", 14) + pad("diversity_mean", 17) + "extroversion_median\n";
  for (const auto& dim : dims_all) {
    if (dim == "residential") continue;
    const auto& t = tables.at(dim);
    r += "  " + pad(dim, 14) + pad(fmt(mean_of(t.diversity)), 17) +
         fmt(median_of(t.extroversion)) + "\n";
  }
  r += "\n";

  r += "normal-vote OLS R^2 by scope (dimension/party)\n";
  r += "  " + pad("scope", 10);
  for (const auto& dim : kCoreDimensions)
    for (const auto& party : kParties) r += pad(dim + "/" + party, 17);
  r += "\n";
  for (const auto& scope : kScopes) {
    r += "  " + pad(scope, 10);
    for (const auto& dim : kCoreDimensions)
      for (const auto& party : kParties) {
        const json& f = load("fit_ols_" + party + "_" + dim + "_" + scope + ".json");
        r += pad(fmt(f.at("r2").get<double>()), 17);
      }
    r += "\n";
  }
  r += "\n";

  if (has_commuting) {
    r += "commuting OLS R^2 by scope\n";
    r += "  " + pad("scope", 10) + pad("commuting/dem", 17) + "commuting/rep\n";
    for (const auto& scope : kScopes) {
      r += "  " + pad(scope, 10);
      const json& fd = load("fit_ols_dem_commuting_" + scope + ".json");
      const json& fr = load("fit_ols_rep_commuting_" + scope + ".json");
      r += pad(fmt(fd.at("r2").get<double>()), 17) + fmt(fr.at("r2").get<double>()) + "\n";
    }
    r += "\n";
  }

  r += "spatial lag (SAR) rho by k, all counties\n";
  r += "  " + pad("model", 18);
  for (int k : ks) r += pad("k=" + std::to_string(k), 15);
  r += "\n";
  for (const auto& dim : dims_all)
    for (const auto& party : kParties) {
      r += "  " + pad(dim + "/" + party, 18);
      for (int k : ks) {
        const json& f = load("fit_sar_" + party + "_" + dim + "_k" + std::to_string(k) +
                             ".json");
        double rho = f.at("rho").get<double>();
        double p = f.at("rho_p").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                           : f.at("rho_p").get<double>();
        r += pad(fmt(rho) + " " + stats::significance_stars(p), 15);
      }
      r += "\n";
    }
  r += "\n";

  r += "dominance, percent relative importance (all counties)\n";
  r += "  " + pad("predictor", 24) + pad("dem", 11) + "rep\n";
  std::map<std::string, std::string> rep_percent;
  for (const auto& [predictor, pct] : percent_all["rep"]) rep_percent[predictor] = pct;
  for (const auto& [predictor, pct] : percent_all["dem"]) {
    double dem_value = csv::parse_double(pct, "dominance percent");
    auto it = rep_percent.find(predictor);
    double rep_value = it == rep_percent.end()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : csv::parse_double(it->second, "dominance percent");
    r += "  " + pad(predictor, 24) + pad(fmt(dem_value, 2), 11) + fmt(rep_value, 2) + "\n";
  }
  r += "\n";

  r += "elastic net (best cross-validated cell)\n";
  r += "  " + pad("party", 8) + pad("alpha", 10) + pad("l1_ratio", 10) +
       pad("train_r2", 10) + "test_r2\n";
  for (const auto& party : kParties) {
    const json& e = load("elasticnet_" + party + ".json");
    r += "  " + pad(party, 8) + pad(csv::format_double(e.at("best_alpha").get<double>()), 10) +
         pad(csv::format_double(e.at("best_l1_ratio").get<double>()), 10) +
         pad(fmt(e.at("train_r2").get<double>()), 10) +
         fmt(e.at("test_r2").get<double>()) + "\n";
  }
  r += "\n";

  r += "gbm + shapley (metro counties, demographic features)\n";
  r += "  " + pad("dimension", 14) + pad("test_r2", 10) + pad("top_feature", 24) +
       "mean_abs_impact\n";
  for (const auto& dim : kCoreDimensions) {
    const json& g = load("gbm_" + dim + ".json");
    const auto& top = shap.at(dim).at(0);
    r += "  " + pad(dim, 14) + pad(fmt(g.at("test_r2").get<double>()), 10) +
         pad(top.at("feature").get<std::string>(), 24) +
         top.at("mean_abs_impact").get<std::string>() + "\n";
  }
  r += "\n";

  r += "exposure t-tests (pooled, all counties)\n";
  r += "  " + pad("party", 8) + pad("pair", 26) + pad("t", 11) + pad("p", 12) +
       "stars\n";
  for (const auto& row : tests.at("dimensions")) {
    double t_value = csv::parse_double(row.at("t").get<std::string>(), "tests");
    double p_value = csv::parse_double(row.at("p").get<std::string>(), "tests");
    r += "  " + pad(row.at("party").get<std::string>(), 8) +
         pad(row.at("dimension_a").get<std::string>() + " vs " +
                 row.at("dimension_b").get<std::string>(),
             26) +
         pad(fmt(t_value, 3), 11) + pad(fmt_sci(p_value), 12) +
         row.at("stars").get<std::string>() + "\n";
  }

  detail::write_bytes(run_dir / "report.txt", r);
  if (log) log("report: summary.json, report.txt, plot CSVs written");
}

}  // namespace partisan::pipeline
