#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "partisan/core/types.hpp"
#include "partisan/spatial/weights.hpp"

namespace partisan::pipeline {

struct SyntheticSpec {
  int side = 20;  // n = side * side lattice
  double rho = 0.5;
  double alpha = 0.0;
  std::vector<double> beta{1.2};
  double sigma = 0.2;
  int k = 5;
  uint64_t seed = 0;
};

struct SarSample {
  core::CountyTable counties;
  spatial::SpatialWeights w;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

// y = (I - rho W)^-1 (alpha + X beta + eps), eps ~ N(0, sigma^2), solved
// exactly on a seeded lattice of side^2 counties.
SarSample generate_sar(const SyntheticSpec& spec);

// Writes the bundled synthetic corpus: counties.csv (101 rows, one of which is
// absent from the friendship edges and gets dropped at alignment),
// edges_{colocation,friendship,commuting}.csv, votes.csv (2008-2020),
// covariates.csv, and config.ini wired to those files.
void write_fixture(const std::filesystem::path& dir, uint64_t seed);

}  // namespace partisan::pipeline
