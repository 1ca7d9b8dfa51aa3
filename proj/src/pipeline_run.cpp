#include "partisan/pipeline/run.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "partisan/common/csv.hpp"
#include "partisan/common/error.hpp"
#include "partisan/common/rng.hpp"
#include "partisan/core/loaders.hpp"
#include "partisan/importance/dominance.hpp"
#include "partisan/learn/elastic_net.hpp"
#include "partisan/learn/gbm.hpp"
#include "partisan/learn/shapley.hpp"
#include "partisan/spatial/ols.hpp"
#include "partisan/spatial/sar.hpp"
#include "partisan/spatial/weights.hpp"
#include "partisan/stats/tests.hpp"
#include "partisan/stats/vif.hpp"
#include "pipeline_io.hpp"

namespace partisan::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  return out;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

std::vector<double> gather(const std::vector<double>& v, const std::vector<int>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(v[static_cast<size_t>(r)]);
  return out;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double r2_score(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted) {
  if (y.size() == 0) return 0.0;
  double mean = y.mean();
  double sst = (y.array() - mean).square().sum();
  if (sst <= 0.0) return 0.0;
  return 1.0 - (y - fitted).squaredNorm() / sst;
}

json coefficients_json(const std::vector<spatial::Coefficient>& cs) {
  json arr = json::array();
  for (const auto& c : cs)
    arr.push_back({{"name", c.name},
                   {"estimate", c.estimate},
                   {"se", c.se},
                   {"t", c.t},
                   {"p", c.p}});
  return arr;
}

json ols_fit_json(const spatial::OlsFit& f, const std::string& party,
                  const std::string& dim, const std::string& scope) {
  json j;
  j["model"] = "ols";
  j["party"] = party;
  j["dimension"] = dim;
  j["scope"] = scope;
  j["k"] = nullptr;
  j["rho"] = nullptr;
  j["rho_se"] = nullptr;
  j["rho_t"] = nullptr;
  j["rho_p"] = nullptr;
  j["coefficients"] = coefficients_json(f.coefficients);
  j["r2"] = f.r2;
  j["sigma2"] = f.sigma2;
  j["loglik"] = f.loglik;
  j["aic"] = f.aic;
  j["n"] = f.n;
  j["k_params"] = f.k_params;
  return j;
}

json sar_fit_json(const spatial::SarFit& f, const std::string& party,
                  const std::string& dim, int k) {
  json j;
  j["model"] = "sar";
  j["party"] = party;
  j["dimension"] = dim;
  j["scope"] = "all";
  j["k"] = k;
  j["rho"] = f.rho;
  j["rho_se"] = f.rho_se;
  j["rho_t"] = f.rho_t;
  j["rho_p"] = f.rho_p;
  j["coefficients"] = coefficients_json(f.coefficients);
  j["r2"] = f.r2;
  if (std::abs(f.r2 - f.r2_variance_ratio) > 1e-6)
    j["r2_variance_ratio"] = f.r2_variance_ratio;
  j["sigma2"] = f.sigma2;
  j["loglik"] = f.loglik;
  j["aic"] = f.aic;
  j["n"] = f.n;
  j["k_params"] = f.k_params;
  return j;
}

std::vector<std::string> stage_ingest(PipelineState& st, const fs::path& out) {
  csv::Writer w({"fips", "lat", "lon", "pop", "rucc", "metro"});
  for (int i = 0; i < st.n(); ++i) {
    const auto& c = st.data.counties[static_cast<size_t>(i)];
    w.add_row();
    w.cell(c.fips);
    w.cell(c.lat);
    w.cell(c.lon);
    w.cell(c.population);
    w.cell(c.rucc);
    w.cell(st.metro[static_cast<size_t>(i)] ? 1 : 0);
  }
  w.write(out / "counties_used.csv");

  csv::Writer d({"fips", "missing_from"});
  for (const auto& [fips, source] : st.data.dropped) {
    d.add_row();
    d.cell(fips);
    d.cell(source);
  }
  d.write(out / "dropped.csv");
  return {"counties_used.csv", "dropped.csv"};
}

std::vector<std::string> stage_normal_vote(PipelineState& st, const fs::path& out) {
  csv::Writer w({"fips", "dem", "rep", "swing", "metro", "population"});
  for (int i = 0; i < st.n(); ++i) {
    size_t u = static_cast<size_t>(i);
    w.add_row();
    w.cell(st.normal.fips[u]);
    w.cell(st.normal.dem[u]);
    w.cell(st.normal.rep[u]);
    w.cell(st.swing[u] ? 1 : 0);
    w.cell(st.metro[u] ? 1 : 0);
    w.cell(st.data.counties[u].population);
  }
  w.write(out / "normal_vote.csv");
  return {"normal_vote.csv"};
}

std::vector<std::string> stage_exposure(PipelineState& st, const fs::path& out) {
  st.ensure_exposures();
  std::vector<std::string> artifacts;
  for (const auto& dim : st.exposure_dimensions()) {
    auto name = "exposure_" + dim + ".csv";
    exposure::write_exposure_csv(st.exposures.at(dim), out / name);
    artifacts.push_back(name);
  }
  for (const auto& dim : st.network_dimensions) {
    auto it = st.exposures_noself.find(dim);
    if (it == st.exposures_noself.end()) continue;
    auto name = "exposure_" + dim + "_noself.csv";
    exposure::write_exposure_csv(it->second, out / name);
    artifacts.push_back(name);
  }
  return artifacts;
}

void write_dimension_tests(const PipelineState& st, const fs::path& path,
                           const std::vector<int>& rows) {
  csv::Writer w({"party", "dimension_a", "dimension_b", "mean_a", "mean_b", "t",
                 "df", "p", "stars"});
  for (const auto& party : kParties)
    for (size_t a = 0; a < kCoreDimensions.size(); ++a)
      for (size_t b = a + 1; b < kCoreDimensions.size(); ++b) {
        auto va = gather(st.pe_column(party, kCoreDimensions[a]), rows);
        auto vb = gather(st.pe_column(party, kCoreDimensions[b]), rows);
        auto r = stats::t_test_pooled(va, vb);
        w.add_row();
        w.cell(party);
        w.cell(kCoreDimensions[a]);
        w.cell(kCoreDimensions[b]);
        w.cell(mean_of(va));
        w.cell(mean_of(vb));
        w.cell(r.t);
        w.cell(r.df);
        w.cell(r.p);
        w.cell(r.stars);
      }
  w.write(path);
}

std::vector<std::string> stage_stats(PipelineState& st, const fs::path& out) {
  st.ensure_exposures();
  write_dimension_tests(st, out / "tests_dimensions.csv", st.scope_rows("all"));
  write_dimension_tests(st, out / "tests_dimensions_metro.csv", st.scope_rows("metro"));
  write_dimension_tests(st, out / "tests_dimensions_nonmetro.csv",
                        st.scope_rows("nonmetro"));
  std::vector<std::string> artifacts = {"tests_dimensions.csv",
                                        "tests_dimensions_metro.csv",
                                        "tests_dimensions_nonmetro.csv"};

  {
    csv::Writer w({"measure", "group_a", "group_b", "mean_a", "mean_b", "t", "df",
                   "p", "stars"});
    auto metro_rows = st.scope_rows("metro");
    auto nonmetro_rows = st.scope_rows("nonmetro");
    for (const auto& party : kParties)
      for (const auto& dim : st.exposure_dimensions()) {
        auto va = gather(st.pe_column(party, dim), metro_rows);
        auto vb = gather(st.pe_column(party, dim), nonmetro_rows);
        auto r = stats::t_test_welch(va, vb);
        w.add_row();
        w.cell("pe_" + party + "_" + dim);
        w.cell("metro");
        w.cell("nonmetro");
        w.cell(mean_of(va));
        w.cell(mean_of(vb));
        w.cell(r.t);
        w.cell(r.df);
        w.cell(r.p);
        w.cell(r.stars);
      }
    w.write(out / "tests_metro_nonmetro.csv");
    artifacts.push_back("tests_metro_nonmetro.csv");
  }

  {
    csv::Writer w({"dimension_a", "dimension_b", "mean_a", "mean_b", "t", "df", "p",
                   "stars"});
    for (size_t a = 0; a < kCoreDimensions.size(); ++a)
      for (size_t b = a + 1; b < kCoreDimensions.size(); ++b) {
        const auto& va = st.exposure_for(kCoreDimensions[a]).segregation;
        const auto& vb = st.exposure_for(kCoreDimensions[b]).segregation;
        auto r = stats::t_test_pooled(va, vb);
        w.add_row();
        w.cell(kCoreDimensions[a]);
        w.cell(kCoreDimensions[b]);
        w.cell(mean_of(va));
        w.cell(mean_of(vb));
        w.cell(r.t);
        w.cell(r.df);
        w.cell(r.p);
        w.cell(r.stars);
      }
    w.write(out / "tests_segregation.csv");
    artifacts.push_back("tests_segregation.csv");
  }

  if (st.has_commuting()) {
    csv::Writer w({"party", "dimension_a", "dimension_b", "mean_a", "mean_b", "t",
                   "df", "p", "stars"});
    for (const auto& party : kParties) {
      const auto& va = st.pe_column(party, "physical");
      const auto& vb = st.pe_column(party, "commuting");
      auto r = stats::t_test_pooled(va, vb);
      w.add_row();
      w.cell(party);
      w.cell("physical");
      w.cell("commuting");
      w.cell(mean_of(va));
      w.cell(mean_of(vb));
      w.cell(r.t);
      w.cell(r.df);
      w.cell(r.p);
      w.cell(r.stars);
    }
    w.write(out / "tests_commuting.csv");
    artifacts.push_back("tests_commuting.csv");
  }

  for (const auto& party : kParties) {
    auto [X, names] = st.predictor_matrix(party, kCoreDimensions);
    auto factors = stats::vif(X, names);
    csv::Writer w({"feature", "vif"});
    for (size_t i = 0; i < names.size(); ++i) {
      w.add_row();
      w.cell(names[i]);
      w.cell(factors[i]);
    }
    auto name = "vif_" + party + ".csv";
    w.write(out / name);
    artifacts.push_back(name);
  }
  return artifacts;
}

std::vector<std::string> stage_fit_ols(PipelineState& st, const fs::path& out) {
  st.ensure_exposures();
  std::vector<std::string> artifacts;
  for (const auto& dim : st.exposure_dimensions())
    for (const auto& party : kParties) {
      Eigen::VectorXd y_all = st.normal_share(party);
      auto pe = st.pe_column(party, dim);
      for (const auto& scope : kScopes) {
        auto rows = st.scope_rows(scope);
        Eigen::VectorXd y = gather(y_all, rows);
        Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 1);
        for (size_t i = 0; i < rows.size(); ++i)
          X(static_cast<Eigen::Index>(i), 0) = pe[static_cast<size_t>(rows[i])];
        auto fit = spatial::fit_ols(y, X, {"pe_" + dim});
        auto name = "fit_ols_" + party + "_" + dim + "_" + scope + ".json";
        detail::write_json(out / name, ols_fit_json(fit, party, dim, scope));
        artifacts.push_back(name);
      }
    }
  return artifacts;
}

std::vector<std::string> stage_fit_sar(PipelineState& st, const fs::path& out) {
  st.ensure_exposures();
  std::vector<int> ks;
  for (int k : st.cfg.k_sweep)
    if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
  std::map<int, spatial::SpatialWeights> weights;
  for (int k : ks) weights.emplace(k, spatial::knn_weights(st.data.counties, k, st.log));

  std::vector<std::string> artifacts;
  for (const auto& dim : st.exposure_dimensions())
    for (const auto& party : kParties) {
      Eigen::VectorXd y = st.normal_share(party);
      auto pe = st.pe_column(party, dim);
      Eigen::MatrixXd X(y.size(), 1);
      for (Eigen::Index i = 0; i < y.size(); ++i) X(i, 0) = pe[static_cast<size_t>(i)];
      for (int k : ks) {
        auto fit = spatial::fit_spatial_lag(y, X, {"pe_" + dim}, weights.at(k));
        auto name = "fit_sar_" + party + "_" + dim + "_k" + std::to_string(k) + ".json";
        detail::write_json(out / name, sar_fit_json(fit, party, dim, k));
        artifacts.push_back(name);
      }
    }
  return artifacts;
}

std::vector<std::string> stage_dominance(PipelineState& st, const fs::path& out) {
  st.ensure_exposures();
  std::vector<std::string> artifacts;
  auto write_report = [&](const importance::DominanceReport& rep, const std::string& name) {
    csv::Writer w({"predictor", "interactional", "individual", "average_partial",
                   "total", "percent"});
    for (const auto& r : rep.rows) {
      w.add_row();
      w.cell(r.predictor);
      w.cell(r.interactional);
      w.cell(r.individual);
      w.cell(r.average_partial);
      w.cell(r.total);
      w.cell(r.percent);
    }
    w.write(out / name);
    artifacts.push_back(name);
  };

  for (const auto& party : kParties) {
    auto [X, names] = st.predictor_matrix(party, kCoreDimensions);
    Eigen::VectorXd y_all = st.normal_share(party);
    for (const auto& scope : kScopes) {
      auto rows = st.scope_rows(scope);
      auto rep = importance::dominance_analysis(gather(y_all, rows),
                                                gather_rows(X, rows), names);
      write_report(rep, "dominance_" + party + "_" + scope + ".csv");
    }
  }
  if (st.has_commuting()) {
    std::vector<std::string> dims = {"physical", "online", "residential", "commuting"};
    for (const auto& party : kParties) {
      auto [X, names] = st.predictor_matrix(party, dims);
      auto rep = importance::dominance_analysis(st.normal_share(party), X, names);
      write_report(rep, "dominance_" + party + "_commuting.csv");
    }
  }
  return artifacts;
}

std::vector<std::string> stage_elasticnet(PipelineState& st, const fs::path& out) {
  st.ensure_exposures();
  std::vector<std::string> artifacts;
  for (const auto& party : kParties) {
    auto [X, names] = st.predictor_matrix(party, kCoreDimensions);
    Eigen::VectorXd y = st.normal_share(party);
    uint64_t split_seed =
        Rng::for_stage(st.cfg.seed, "elasticnet:" + party + ":split").next_u64();
    auto [train, test] = learn::train_test_split(st.n(), st.cfg.en_train_ratio, split_seed);
    Eigen::VectorXd y_train = gather(y, train);
    Eigen::VectorXd y_test = gather(y, test);
    Eigen::MatrixXd x_train = gather_rows(X, train);
    Eigen::MatrixXd x_test = gather_rows(X, test);
    uint64_t cv_seed =
        Rng::for_stage(st.cfg.seed, "elasticnet:" + party + ":cv").next_u64();
    auto cv = learn::cv_grid_search(y_train, x_train, names, st.cfg.en_alphas,
                                    st.cfg.en_l1_ratios, st.cfg.en_folds, cv_seed,
                                    st.cfg.en_tol, st.cfg.en_max_iter);
    double test_r2 = r2_score(y_test, cv.fit.predict(x_test));

    json j;
    j["party"] = party;
    j["n_train"] = static_cast<int>(train.size());
    j["n_test"] = static_cast<int>(test.size());
    j["best_alpha"] = cv.best_alpha;
    j["best_l1_ratio"] = cv.best_l1_ratio;
    json cells = json::array();
    for (const auto& c : cv.cells)
      cells.push_back(
          {{"alpha", c.alpha}, {"l1_ratio", c.l1_ratio}, {"mean_r2", c.mean_r2}});
    j["cv_cells"] = cells;
    j["intercept"] = cv.fit.intercept;
    json betas = json::array();
    for (size_t i = 0; i < names.size(); ++i)
      betas.push_back({{"name", names[i]},
                       {"coefficient", cv.fit.coefficients[i]},
                       {"std_coefficient", cv.fit.std_coefficients[i]}});
    j["betas"] = betas;
    j["train_r2"] = cv.fit.train_r2;
    j["test_r2"] = test_r2;
    j["iterations"] = cv.fit.iterations;
    auto name = "elasticnet_" + party + ".json";
    detail::write_json(out / name, j);
    artifacts.push_back(name);
  }
  return artifacts;
}

std::vector<std::string> stage_gbm_shap(PipelineState& st, const fs::path& out) {
  st.ensure_exposures();
  std::vector<std::string> artifacts;
  auto demo = st.demographic_names();
  auto metro_rows = st.scope_rows("metro");
  Eigen::MatrixXd features(static_cast<Eigen::Index>(metro_rows.size()),
                           static_cast<Eigen::Index>(demo.size()));
  for (size_t c = 0; c < demo.size(); ++c) {
    Eigen::VectorXd col = st.data.covariates.column(demo[c]);
    for (size_t i = 0; i < metro_rows.size(); ++i)
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          col[metro_rows[i]];
  }

  for (const auto& dim : kCoreDimensions) {
    const auto& table = st.exposure_for(dim);
    Eigen::VectorXd y(static_cast<Eigen::Index>(metro_rows.size()));
    for (size_t i = 0; i < metro_rows.size(); ++i)
      y[static_cast<Eigen::Index>(i)] =
          table.segregation[static_cast<size_t>(metro_rows[i])];

    uint64_t seed = Rng::for_stage(st.cfg.seed, "gbm:" + dim).next_u64();
    auto [train, test] =
        learn::train_test_split(static_cast<int>(metro_rows.size()),
                                st.cfg.en_train_ratio, seed);
    std::sort(test.begin(), test.end());
    Eigen::VectorXd y_train = gather(y, train);
    Eigen::VectorXd y_test = gather(y, test);
    Eigen::MatrixXd x_train = gather_rows(features, train);
    Eigen::MatrixXd x_test = gather_rows(features, test);

    auto model = learn::fit_gbm(y_train, x_train, st.cfg.gbm_trees,
                                st.cfg.gbm_learning_rate, st.cfg.gbm_max_depth, seed);
    double train_r2 = r2_score(y_train, model.predict(x_train));
    double test_r2 = r2_score(y_test, model.predict(x_test));

    int n_background = std::min<int>(st.cfg.shap_background_rows,
                                     static_cast<int>(train.size()));
    Eigen::MatrixXd background = x_train.topRows(n_background);
    learn::PredictFn f = [&model](const Eigen::RowVectorXd& x) {
      return model.predict(x);
    };

    std::vector<std::string> header{"fips"};
    for (const auto& name : demo) header.push_back("phi_" + name);
    header.push_back("base");
    header.push_back("prediction");
    csv::Writer w(header);
    std::vector<learn::ShapExplanation> explanations;
    explanations.reserve(test.size());
    for (int t : test) {
      Eigen::RowVectorXd x = features.row(t);
      auto e = learn::shapley_values(f, x, background);
      w.add_row();
      w.cell(st.data.counties[static_cast<size_t>(metro_rows[static_cast<size_t>(t)])].fips);
      for (double phi : e.phi) w.cell(phi);
      w.cell(e.base);
      w.cell(e.prediction);
      explanations.push_back(std::move(e));
    }
    w.write(out / ("shap_" + dim + ".csv"));
    artifacts.push_back("shap_" + dim + ".csv");

    auto impact = learn::mean_abs_shap(explanations, demo);
    csv::Writer wi({"feature", "mean_abs_impact"});
    for (const auto& [name, value] : impact) {
      wi.add_row();
      wi.cell(name);
      wi.cell(value);
    }
    wi.write(out / ("shap_impact_" + dim + ".csv"));
    artifacts.push_back("shap_impact_" + dim + ".csv");

    json j;
    j["dimension"] = dim;
    j["trees"] = st.cfg.gbm_trees;
    j["learning_rate"] = st.cfg.gbm_learning_rate;
    j["max_depth"] = st.cfg.gbm_max_depth;
    j["n_train"] = static_cast<int>(train.size());
    j["n_test"] = static_cast<int>(test.size());
    j["n_background"] = n_background;
    j["base"] = model.base;
    j["train_r2"] = train_r2;
    j["test_r2"] = test_r2;
    detail::write_json(out / ("gbm_" + dim + ".json"), j);
    artifacts.push_back("gbm_" + dim + ".json");
  }
  return artifacts;
}

using StageFn = std::vector<std::string> (*)(PipelineState&, const fs::path&);

const std::vector<std::pair<std::string, StageFn>>& stage_table() {
  static const std::vector<std::pair<std::string, StageFn>> table = {
      {"ingest", &stage_ingest},       {"normal_vote", &stage_normal_vote},
      {"exposure", &stage_exposure},   {"stats", &stage_stats},
      {"fit_ols", &stage_fit_ols},     {"fit_sar", &stage_fit_sar},
      {"dominance", &stage_dominance}, {"elasticnet", &stage_elasticnet},
      {"gbm_shap", &stage_gbm_shap}};
  return table;
}

json config_echo_json(const RunConfig& cfg) {
  json j;
  j["counties"] = cfg.counties.filename().string();
  j["votes"] = cfg.votes.filename().string();
  j["covariates"] = cfg.covariates.filename().string();
  json edges = json::object();
  for (const auto& [kind, path] : cfg.edges) edges[kind] = path.filename().string();
  j["edges"] = edges;
  j["election_years"] = cfg.election_years;
  j["swing_window"] = cfg.swing_window;
  j["k_sweep"] = cfg.k_sweep;
  j["exclude_self"] = cfg.exclude_self;
  j["elasticnet"] = {{"alphas", cfg.en_alphas},     {"l1_ratios", cfg.en_l1_ratios},
                     {"folds", cfg.en_folds},       {"train_ratio", cfg.en_train_ratio},
                     {"tol", cfg.en_tol},           {"max_iter", cfg.en_max_iter}};
  j["gbm"] = {{"trees", cfg.gbm_trees},
              {"learning_rate", cfg.gbm_learning_rate},
              {"max_depth", cfg.gbm_max_depth},
              {"shap_background_rows", cfg.shap_background_rows}};
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace

bool PipelineState::has_commuting() const {
  return std::find(network_dimensions.begin(), network_dimensions.end(),
                   "commuting") != network_dimensions.end();
}

std::vector<std::string> PipelineState::exposure_dimensions() const {
  auto dims = network_dimensions;
  dims.push_back("residential");
  return dims;
}

void PipelineState::ensure_exposures() {
  if (!exposures.empty()) return;
  for (const auto& dim : network_dimensions) {
    exposures.emplace(dim, exposure::network_exposure_table(dim, nets.at(dim),
                                                            normal.dem, normal.rep,
                                                            false));
    if (cfg.exclude_self && (dim == "physical" || dim == "online"))
      exposures_noself.emplace(
          dim, exposure::network_exposure_table(dim + "_noself", nets.at(dim),
                                                normal.dem, normal.rep, true));
  }

  const auto& cov = data.covariates;
  static const char* kResidentialColumns[] = {"res_rep_given_dem", "res_dem_given_rep",
                                              "res_p_dem", "res_p_rep"};
  for (const char* column : kResidentialColumns)
    if (!cov.has_column(column))
      throw Error(ErrorCode::Validation,
                  std::string("covariates missing residential column ") + column);
  auto column_values = [&](const char* column) {
    Eigen::VectorXd v = cov.column(column);
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  exposures.emplace(
      "residential",
      exposure::residential_exposure_table(
          data.counties.fips_list(), column_values("res_rep_given_dem"),
          column_values("res_dem_given_rep"), column_values("res_p_dem"),
          column_values("res_p_rep")));
}

const exposure::ExposureTable& PipelineState::exposure_for(
    const std::string& dimension) const {
  auto it = exposures.find(dimension);
  if (it == exposures.end())
    throw Error(ErrorCode::Validation, "no exposure table for dimension " + dimension);
  return it->second;
}

std::vector<int> PipelineState::scope_rows(const std::string& scope) const {
  std::vector<int> rows;
  rows.reserve(static_cast<size_t>(n()));
  for (int i = 0; i < n(); ++i) {
    size_t u = static_cast<size_t>(i);
    bool keep = false;
    if (scope == "all")
      keep = true;
    else if (scope == "metro")
      keep = metro[u];
    else if (scope == "nonmetro")
      keep = !metro[u];
    else if (scope == "swing")
      keep = swing[u];
    else if (scope == "nonswing")
      keep = !swing[u];
    else
      throw Error(ErrorCode::Validation, "unknown scope " + scope);
    if (keep) rows.push_back(i);
  }
  return rows;
}

Eigen::VectorXd PipelineState::normal_share(const std::string& party) const {
  const std::vector<double>* v = nullptr;
  if (party == "dem")
    v = &normal.dem;
  else if (party == "rep")
    v = &normal.rep;
  else
    throw Error(ErrorCode::Validation, "unknown party " + party);
  return Eigen::Map<const Eigen::VectorXd>(v->data(),
                                           static_cast<Eigen::Index>(v->size()));
}

std::vector<double> PipelineState::pe_column(const std::string& party,
                                             const std::string& dimension) const {
  const auto& table = exposure_for(dimension);
  if (party == "dem") return table.pe_dem;
  if (party == "rep") return table.pe_rep;
  throw Error(ErrorCode::Validation, "unknown party " + party);
}

std::vector<std::string> PipelineState::demographic_names() const {
  std::vector<std::string> out;
  for (const auto& name : data.covariates.names())
    if (name.rfind("res_", 0) != 0) out.push_back(name);
  return out;
}

std::pair<Eigen::MatrixXd, std::vector<std::string>> PipelineState::predictor_matrix(
    const std::string& party, const std::vector<std::string>& dims) const {
  auto demo = demographic_names();
  std::vector<std::string> names;
  names.reserve(dims.size() + demo.size());
  for (const auto& d : dims) names.push_back("pe_" + d);
  names.insert(names.end(), demo.begin(), demo.end());

  Eigen::MatrixXd X(n(), static_cast<Eigen::Index>(names.size()));
  Eigen::Index c = 0;
  for (const auto& d : dims) {
    auto col = pe_column(party, d);
    for (int i = 0; i < n(); ++i) X(i, c) = col[static_cast<size_t>(i)];
    ++c;
  }
  for (const auto& name : demo) X.col(c++) = data.covariates.column(name);
  return {std::move(X), std::move(names)};
}

namespace {

// Load, drop isolated counties, align, and build probability networks.
PipelineState prepare_inputs(const RunConfig& cfg, core::LogFn log) {
  PipelineState st;
  st.cfg = cfg;
  st.log = std::move(log);

  auto counties = core::load_counties(cfg.counties);
  auto panel = core::load_votes(cfg.votes);
  auto covariates = core::load_covariates(cfg.covariates);

  std::map<std::string, core::ConnectivityNetwork> raw;
  for (const auto& [kind_name, path] : cfg.edges) {
    auto net = core::load_network_edges(path, counties,
                                        core::network_kind_from_name(kind_name), st.log);
    std::vector<int> active;
    for (int i = 0; i < static_cast<int>(net.size()); ++i)
      if (net.row_sum(i) > 0.0) active.push_back(i);
    if (active.size() < net.size()) {
      if (st.log)
        st.log(kind_name + ": dropping " +
               std::to_string(net.size() - active.size()) +
               " counties with no connections");
      raw.emplace(kind_name, net.restricted_to(active));
    } else {
      raw.emplace(kind_name, std::move(net));
    }
  }

  st.data = core::align_datasets(counties, raw, panel, covariates);

  const std::vector<std::pair<std::string, std::string>> kind_to_dimension = {
      {"colocation", "physical"}, {"friendship", "online"}, {"commuting", "commuting"}};
  for (const auto& [kind, dimension] : kind_to_dimension) {
    auto it = st.data.networks.find(kind);
    if (it == st.data.networks.end()) continue;
    st.network_dimensions.push_back(dimension);
    if (kind == "colocation")
      st.nets.emplace(dimension, it->second);
    else
      st.nets.emplace(dimension, core::probability_network(it->second, st.data.counties));
  }

  return st;
}

// Normal vote, swing flags, and metro flags over the aligned panel.
void derive_panel(PipelineState& st) {
  st.normal = core::normal_vote(st.data.panel, st.cfg.election_years);
  st.swing = core::classify_swing(st.data.panel, st.cfg.swing_years());
  auto partition = core::partition_metro(st.data.counties);
  st.metro.assign(static_cast<size_t>(st.n()), false);
  for (int i : partition.metro) st.metro[static_cast<size_t>(i)] = true;
}

}  // namespace

PipelineState prepare(const RunConfig& cfg, core::LogFn log) {
  PipelineState st = prepare_inputs(cfg, std::move(log));
  derive_panel(st);
  return st;
}

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : stage_table()) out.push_back(name);
    return out;
  }();
  return names;
}

std::vector<std::string> run_stage(PipelineState& st, const std::string& name,
                                   const fs::path& out) {
  for (const auto& [stage, fn] : stage_table()) {
    if (stage != name) continue;
    fs::create_directories(out);
    return fn(st, out);
  }
  throw Error(ErrorCode::Validation, "unknown stage " + name);
}

std::filesystem::path run_pipeline(const RunConfig& cfg, core::LogFn log) {
  fs::create_directories(cfg.out);

  json manifest;
  manifest["format_version"] = kManifestFormatVersion;
  manifest["toolkit_version"] = kToolkitVersion;
  manifest["seed"] = cfg.seed;
  std::string config_bytes;
  if (!cfg.config_path.empty() && fs::exists(cfg.config_path))
    config_bytes = detail::read_bytes(cfg.config_path);
  manifest["config_hash"] = detail::fnv1a_hex(config_bytes);
  manifest["config"] = config_echo_json(cfg);

  json stages = json::array();
  auto persist = [&](const std::string& status, const json& failed_stage) {
    manifest["stages"] = stages;
    manifest["status"] = status;
    manifest["failed_stage"] = failed_stage;
    detail::write_json(cfg.out / "manifest.json", manifest);
  };

  std::optional<PipelineState> st;
  try {
    st.emplace(prepare_inputs(cfg, log));
  } catch (const Error& e) {
    manifest["counties_used"] = nullptr;
    manifest["dropped"] = json::array();
    persist("failed", "ingest");
    throw Error(e.code(), "stage ingest: " + e.detail());
  }
  manifest["counties_used"] = st->n();
  json dropped = json::array();
  for (const auto& [fips, source] : st->data.dropped)
    dropped.push_back({{"fips", fips}, {"missing_from", source}});
  manifest["dropped"] = dropped;

  try {
    derive_panel(*st);
  } catch (const Error& e) {
    persist("failed", "normal_vote");
    throw Error(e.code(), "stage normal_vote: " + e.detail());
  }

  for (const auto& name : stage_names()) {
    try {
      auto artifacts = run_stage(*st, name, cfg.out);
      stages.push_back({{"name", name}, {"artifacts", artifacts}});
    } catch (const Error& e) {
      persist("failed", name);
      throw Error(e.code(), "stage " + name + ": " + e.detail());
    }
  }
  persist("completed", nullptr);
  if (log) log("run complete: " + std::to_string(stage_names().size()) + " stages");
  return cfg.out / "manifest.json";
}

}  // namespace partisan::pipeline
