#include "partisan/spatial/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "partisan/common/error.hpp"

namespace partisan::spatial {

namespace {
constexpr double kEarthRadiusKm = 6371.0088;

double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
}  // namespace

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  double phi1 = to_rad(lat1), phi2 = to_rad(lat2);
  double dphi = to_rad(lat2 - lat1), dlam = to_rad(lon2 - lon1);
  double s1 = std::sin(dphi / 2.0), s2 = std::sin(dlam / 2.0);
  double a = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

SpatialWeights knn_weights(const core::CountyTable& counties, int k,
                           const core::LogFn& log) {
  const int n = static_cast<int>(counties.size());
  if (k < 1)
    throw Error(ErrorCode::Validation, "knn_weights: k must be positive");
  if (k >= n)
    throw Error(ErrorCode::Validation,
                "knn_weights: k=" + std::to_string(k) + " >= N=" + std::to_string(n));

  // Duplicate centroids: warn, the fips tie-break keeps the result determined.
  {
    std::vector<int> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const auto& ra = counties[static_cast<size_t>(a)];
      const auto& rb = counties[static_cast<size_t>(b)];
      if (ra.lat != rb.lat) return ra.lat < rb.lat;
      return ra.lon < rb.lon;
    });
    for (int i = 1; i < n; ++i) {
      const auto& a = counties[static_cast<size_t>(order[static_cast<size_t>(i - 1)])];
      const auto& b = counties[static_cast<size_t>(order[static_cast<size_t>(i)])];
      if (a.lat == b.lat && a.lon == b.lon && log)
        log("knn_weights: duplicate centroid for " + a.fips + " and " + b.fips);
    }
  }

  SpatialWeights out;
  out.county_index = counties.fips_list();
  out.k = k;
  out.w.resize(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(n) * static_cast<size_t>(k));

  const double weight = 1.0 / static_cast<double>(k);
  std::vector<std::pair<double, int>> cand(static_cast<size_t>(n - 1));
  for (int i = 0; i < n; ++i) {
    const auto& ci = counties[static_cast<size_t>(i)];
    size_t m = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto& cj = counties[static_cast<size_t>(j)];
      cand[m++] = {haversine_km(ci.lat, ci.lon, cj.lat, cj.lon), j};
    }
    auto closer = [&](const std::pair<double, int>& a, const std::pair<double, int>& b) {
      if (a.first != b.first) return a.first < b.first;
      return counties[static_cast<size_t>(a.second)].fips <
             counties[static_cast<size_t>(b.second)].fips;
    };
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end(), closer);
    for (int t = 0; t < k; ++t)
      trips.emplace_back(i, cand[static_cast<size_t>(t)].second, weight);
  }
  out.w.setFromTriplets(trips.begin(), trips.end());
  out.w.makeCompressed();
  return out;
}

}  // namespace partisan::spatial
