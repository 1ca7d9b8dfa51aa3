#pragma once

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "partisan/core/types.hpp"

namespace partisan::spatial {

struct SpatialWeights {
  std::vector<std::string> county_index;
  Eigen::SparseMatrix<double, Eigen::RowMajor> w;  // zero diagonal, rows sum to 1
  int k = 0;
  std::string metric = "haversine";

  size_t size() const { return county_index.size(); }
  Eigen::MatrixXd to_dense() const { return Eigen::MatrixXd(w); }
};

// Great-circle distance in km between two (lat, lon) points in degrees.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

// k nearest neighbors by haversine distance, ties broken by ascending fips,
// each neighbor weighted 1/k. Duplicate centroids produce a warning.
SpatialWeights knn_weights(const core::CountyTable& counties, int k,
                           const core::LogFn& log = {});

}  // namespace partisan::spatial
