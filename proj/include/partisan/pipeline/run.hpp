#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "partisan/core/derive.hpp"
#include "partisan/core/types.hpp"
#include "partisan/exposure/exposure.hpp"
#include "partisan/pipeline/config.hpp"

namespace partisan::pipeline {

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr int kManifestFormatVersion = 1;

inline const std::vector<std::string> kScopes = {"all", "metro", "nonmetro",
                                                 "swing", "nonswing"};
inline const std::vector<std::string> kParties = {"dem", "rep"};
// Dimensions carried by the three core data sources; commuting is appended
// when its edge list is configured.
inline const std::vector<std::string> kCoreDimensions = {"physical", "online",
                                                         "residential"};

// Aligned inputs plus everything derived once and shared between stages.
struct PipelineState {
  RunConfig cfg;
  core::LogFn log;

  core::AlignedDataset data;
  // Probability networks keyed by dimension (physical, online, commuting).
  std::map<std::string, core::ConnectivityNetwork> nets;
  std::vector<std::string> network_dimensions;

  core::NormalVote normal;
  std::vector<bool> swing;
  std::vector<bool> metro;

  // Filled lazily by ensure_exposures(); keyed by dimension, residential
  // included. The noself map holds the diagonal-free variants when
  // cfg.exclude_self is set.
  std::map<std::string, exposure::ExposureTable> exposures;
  std::map<std::string, exposure::ExposureTable> exposures_noself;

  int n() const { return static_cast<int>(data.counties.size()); }
  bool has_commuting() const;
  // network dimensions followed by residential
  std::vector<std::string> exposure_dimensions() const;

  void ensure_exposures();
  const exposure::ExposureTable& exposure_for(const std::string& dimension) const;

  std::vector<int> scope_rows(const std::string& scope) const;
  Eigen::VectorXd normal_share(const std::string& party) const;
  std::vector<double> pe_column(const std::string& party,
                                const std::string& dimension) const;
  // covariate columns that are not residential-inversion inputs (res_*)
  std::vector<std::string> demographic_names() const;

  // Per-party exposure columns for `dims` followed by the demographics;
  // returns the matrix over all counties plus the column names.
  std::pair<Eigen::MatrixXd, std::vector<std::string>> predictor_matrix(
      const std::string& party, const std::vector<std::string>& dims) const;
};

// Loads, drops network-isolated counties, aligns all sources, and derives the
// normal vote, swing flags, metro flags, and probability networks.
PipelineState prepare(const RunConfig& cfg, core::LogFn log = {});

// Stage names in execution order.
const std::vector<std::string>& stage_names();

// Runs one stage; writes its artifacts under `out` and returns their
// run-relative file names.
std::vector<std::string> run_stage(PipelineState& st, const std::string& name,
                                   const std::filesystem::path& out);

// Full pipeline into cfg.out: every stage in order plus manifest.json. A stage
// failure writes a failed manifest naming the stage, then rethrows with the
// stage name prefixed.
std::filesystem::path run_pipeline(const RunConfig& cfg, core::LogFn log = {});

// Builds summary.json, report.txt, and plot-data CSVs from a completed run
// directory. A missing manifest or stage artifact raises IncompleteRun naming
// the stage.
void emit_report(const std::filesystem::path& run_dir, core::LogFn log = {});

}  // namespace partisan::pipeline
