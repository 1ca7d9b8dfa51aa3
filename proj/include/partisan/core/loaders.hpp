#pragma once

#include <filesystem>

#include "partisan/core/types.hpp"

namespace partisan::core {

// counties.csv: fips,lat,lon,pop,rucc
CountyTable load_counties(const std::filesystem::path& path);

// edges_<kind>.csv: src_fips,dst_fips,weight. Absent pairs are zero; edges
// referencing fips outside `counties` are rejected; duplicate (src,dst)
// pairs are summed with a warning through `log`.
ConnectivityNetwork load_network_edges(const std::filesystem::path& path,
                                       const CountyTable& counties,
                                       NetworkKind kind, const LogFn& log = {});

// votes.csv: fips,year,dem_share,rep_share
ElectionPanel load_votes(const std::filesystem::path& path);

// covariates.csv: fips,<name>,...; every non-fips column is a real-valued
// covariate.
CovariateTable load_covariates(const std::filesystem::path& path);

}  // namespace partisan::core
