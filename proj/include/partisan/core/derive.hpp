#pragma once

#include <vector>

#include "partisan/core/types.hpp"

namespace partisan::core {

// sci_count / (pop_i * pop_j). Populations must be >= 1.
double friendship_probability(double sci_count, long long pop_i, long long pop_j);

// flow / (pop_i * pop_j). Same contract as friendship_probability.
double commuting_probability(double flow, long long pop_i, long long pop_j);

// Scales every edge weight by 1 / (pop_src * pop_dst). Used to turn raw SCI
// counts or commuting flows into connection probabilities.
ConnectivityNetwork probability_network(const ConnectivityNetwork& raw,
                                        const CountyTable& counties);

struct NormalVote {
  std::vector<std::string> fips;  // sorted, matches panel ordering
  std::vector<double> dem;
  std::vector<double> rep;
};

// Mean share per party over the given years. Every county must report every
// requested year.
NormalVote normal_vote(const ElectionPanel& panel, const std::vector<int>& years);

// Flag per county (panel fips order): true iff the majority party differs
// between at least one pair of consecutive years. Exact ties are an error.
std::vector<bool> classify_swing(const ElectionPanel& panel,
                                 const std::vector<int>& years);

struct MetroPartition {
  std::vector<int> metro;      // indices into the county table, rucc 1..3
  std::vector<int> non_metro;  // rucc 4..9
};

MetroPartition partition_metro(const CountyTable& counties);

}  // namespace partisan::core
