#include "partisan/core/derive.hpp"

#include <string>

#include "partisan/common/error.hpp"

namespace partisan::core {

double friendship_probability(double sci_count, long long pop_i, long long pop_j) {
  if (pop_i < 1 || pop_j < 1)
    throw Error(ErrorCode::Validation, "friendship_probability: population must be >= 1");
  if (sci_count < 0.0)
    throw Error(ErrorCode::Validation, "friendship_probability: negative count");
  return sci_count / (static_cast<double>(pop_i) * static_cast<double>(pop_j));
}

double commuting_probability(double flow, long long pop_i, long long pop_j) {
  if (pop_i < 1 || pop_j < 1)
    throw Error(ErrorCode::Validation, "commuting_probability: population must be >= 1");
  if (flow < 0.0)
    throw Error(ErrorCode::Validation, "commuting_probability: negative flow");
  return flow / (static_cast<double>(pop_i) * static_cast<double>(pop_j));
}

ConnectivityNetwork probability_network(const ConnectivityNetwork& raw,
                                        const CountyTable& counties) {
  const auto& index = raw.county_index();
  std::vector<double> pop(index.size());
  for (size_t i = 0; i < index.size(); ++i) {
    int c = counties.index_of(index[i]);
    if (c < 0)
      throw Error(ErrorCode::UnknownCounty,
                  "probability_network: fips " + index[i] + " not in county table");
    pop[i] = static_cast<double>(counties[static_cast<size_t>(c)].population);
  }
  std::vector<Eigen::Triplet<double>> trips;
  for (size_t i = 0; i < index.size(); ++i) {
    raw.for_each_in_row(static_cast<int>(i), [&](int j, double w) {
      trips.emplace_back(static_cast<int>(i), j,
                         w / (pop[i] * pop[static_cast<size_t>(j)]));
    });
  }
  return ConnectivityNetwork(index, raw.kind(), trips);
}

NormalVote normal_vote(const ElectionPanel& panel, const std::vector<int>& years) {
  if (years.empty())
    throw Error(ErrorCode::Validation, "normal_vote: empty year list");
  NormalVote out;
  out.fips = panel.fips_list();
  out.dem.resize(out.fips.size());
  out.rep.resize(out.fips.size());
  for (size_t i = 0; i < out.fips.size(); ++i) {
    double d = 0.0, r = 0.0;
    for (int y : years) {
      d += panel.dem_share(out.fips[i], y);
      r += panel.rep_share(out.fips[i], y);
    }
    out.dem[i] = d / static_cast<double>(years.size());
    out.rep[i] = r / static_cast<double>(years.size());
  }
  return out;
}

std::vector<bool> classify_swing(const ElectionPanel& panel,
                                 const std::vector<int>& years) {
  if (years.size() < 2)
    throw Error(ErrorCode::Validation, "classify_swing: need at least two years");
  const auto& fips = panel.fips_list();
  std::vector<bool> out(fips.size(), false);
  for (size_t i = 0; i < fips.size(); ++i) {
    int prev = 0;  // +1 dem, -1 rep
    for (size_t t = 0; t < years.size(); ++t) {
      double d = panel.dem_share(fips[i], years[t]);
      double r = panel.rep_share(fips[i], years[t]);
      if (d == r)
        throw Error(ErrorCode::Tie, "classify_swing: tied majority in county " + fips[i] +
                                        " year " + std::to_string(years[t]));
      int cur = d > r ? 1 : -1;
      if (t > 0 && cur != prev) out[i] = true;
      prev = cur;
    }
  }
  return out;
}

MetroPartition partition_metro(const CountyTable& counties) {
  MetroPartition out;
  for (size_t i = 0; i < counties.size(); ++i) {
    if (counties[i].rucc <= 3)
      out.metro.push_back(static_cast<int>(i));
    else
      out.non_metro.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace partisan::core
