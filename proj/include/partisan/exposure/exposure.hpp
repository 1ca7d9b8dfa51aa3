#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "partisan/core/types.hpp"

namespace partisan::exposure {

// PE_p(i) = sum_j v_p(j) * p_ij / sum_k p_ik. shares aligned with the network's
// county index. exclude_self zeroes the diagonal before normalizing.
std::vector<double> partisan_exposure(const core::ConnectivityNetwork& net,
                                      const std::vector<double>& shares,
                                      bool exclude_self = false);

// P(R) = P(R|D) * P(D) / P(D|R). The symmetric partner recovers P(D).
double residential_exposure_rep(double p_rep_given_dem, double p_dem_given_rep,
                                double p_dem);
double residential_exposure_dem(double p_dem_given_rep, double p_rep_given_dem,
                                double p_rep);

// (pe_rep - pe_dem + 1) / 2: 0 all-Democratic exposure, 1 all-Republican,
// 0.5 balanced.
double partisan_segregation(double pe_rep, double pe_dem);

// D(i) = -sum_j q_ij ln q_ij / ln k over row shares q_ij. Needs k >= 2 counties.
std::vector<double> network_diversity(const core::ConnectivityNetwork& net);

// E(i) = external probability / internal probability = sum_{j != i} p_ij / p_ii.
std::vector<double> extroversion(const core::ConnectivityNetwork& net);

// Per-dimension per-county summary. diversity/extroversion are NaN when the
// dimension has no supporting network (residential).
struct ExposureTable {
  std::string dimension;
  std::vector<std::string> fips;
  std::vector<double> pe_dem;
  std::vector<double> pe_rep;
  std::vector<double> segregation;
  std::vector<double> diversity;
  std::vector<double> extroversion;

  size_t size() const { return fips.size(); }
};

// Full table for a network dimension. shares_* aligned with net's county index.
ExposureTable network_exposure_table(const std::string& dimension,
                                     const core::ConnectivityNetwork& net,
                                     const std::vector<double>& shares_dem,
                                     const std::vector<double>& shares_rep,
                                     bool exclude_self);

// Residential table via Bayes inversion of per-county conditional columns.
ExposureTable residential_exposure_table(const std::vector<std::string>& fips,
                                         const std::vector<double>& p_rep_given_dem,
                                         const std::vector<double>& p_dem_given_rep,
                                         const std::vector<double>& p_dem,
                                         const std::vector<double>& p_rep);

void write_exposure_csv(const ExposureTable& table, const std::filesystem::path& path);
ExposureTable read_exposure_csv(const std::filesystem::path& path);

}  // namespace partisan::exposure
