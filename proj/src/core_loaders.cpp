#include "partisan/core/loaders.hpp"

#include <map>

#include "partisan/common/csv.hpp"
#include "partisan/common/error.hpp"

namespace partisan::core {

CountyTable load_counties(const std::filesystem::path& path) {
  auto t = csv::read_file(path);
  int c_fips = t.require_column("fips");
  int c_lat = t.require_column("lat");
  int c_lon = t.require_column("lon");
  int c_pop = t.require_column("pop");
  int c_rucc = t.require_column("rucc");

  std::vector<CountyRecord> rows;
  rows.reserve(t.rows.size());
  for (size_t r = 0; r < t.rows.size(); ++r) {
    std::string where = path.filename().string() + " row " + std::to_string(r + 1);
    CountyRecord rec;
    rec.fips = t.rows[r][static_cast<size_t>(c_fips)];
    rec.lat = csv::parse_double(t.rows[r][static_cast<size_t>(c_lat)], where + " col lat");
    rec.lon = csv::parse_double(t.rows[r][static_cast<size_t>(c_lon)], where + " col lon");
    rec.population = csv::parse_int(t.rows[r][static_cast<size_t>(c_pop)], where + " col pop");
    rec.rucc = static_cast<int>(
        csv::parse_int(t.rows[r][static_cast<size_t>(c_rucc)], where + " col rucc"));
    validate_county(rec, where);
    rows.push_back(std::move(rec));
  }
  return CountyTable(std::move(rows));
}

ConnectivityNetwork load_network_edges(const std::filesystem::path& path,
                                       const CountyTable& counties,
                                       NetworkKind kind, const LogFn& log) {
  auto t = csv::read_file(path);
  int c_src = t.require_column("src_fips");
  int c_dst = t.require_column("dst_fips");
  int c_w = t.require_column("weight");

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(t.rows.size());
  std::map<std::pair<int, int>, size_t> seen;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    std::string where = path.filename().string() + " row " + std::to_string(r + 1);
    const std::string& src = t.rows[r][static_cast<size_t>(c_src)];
    const std::string& dst = t.rows[r][static_cast<size_t>(c_dst)];
    int i = counties.index_of(src);
    int j = counties.index_of(dst);
    if (i < 0) throw Error(ErrorCode::UnknownCounty, where + ": unknown fips " + src);
    if (j < 0) throw Error(ErrorCode::UnknownCounty, where + ": unknown fips " + dst);
    double w = csv::parse_double(t.rows[r][static_cast<size_t>(c_w)], where + " col weight");
    if (w < 0.0)
      throw Error(ErrorCode::Validation, where + ": negative weight");
    auto [it, fresh] = seen.emplace(std::make_pair(i, j), r + 1);
    if (!fresh && log)
      log(path.filename().string() + ": duplicate edge (" + src + "," + dst + ") at row " +
          std::to_string(r + 1) + " summed with row " + std::to_string(it->second));
    trips.emplace_back(i, j, w);
  }
  return ConnectivityNetwork(counties.fips_list(), kind, trips);
}

ElectionPanel load_votes(const std::filesystem::path& path) {
  auto t = csv::read_file(path);
  int c_fips = t.require_column("fips");
  int c_year = t.require_column("year");
  int c_dem = t.require_column("dem_share");
  int c_rep = t.require_column("rep_share");

  std::vector<ElectionPanel::Row> rows;
  rows.reserve(t.rows.size());
  for (size_t r = 0; r < t.rows.size(); ++r) {
    std::string where = path.filename().string() + " row " + std::to_string(r + 1);
    ElectionPanel::Row row;
    row.fips = t.rows[r][static_cast<size_t>(c_fips)];
    row.year = static_cast<int>(
        csv::parse_int(t.rows[r][static_cast<size_t>(c_year)], where + " col year"));
    row.dem_share = csv::parse_double(t.rows[r][static_cast<size_t>(c_dem)], where + " col dem_share");
    row.rep_share = csv::parse_double(t.rows[r][static_cast<size_t>(c_rep)], where + " col rep_share");
    rows.push_back(std::move(row));
  }
  return ElectionPanel(rows);
}

CovariateTable load_covariates(const std::filesystem::path& path) {
  auto t = csv::read_file(path);
  int c_fips = t.require_column("fips");

  std::vector<std::string> names;
  std::vector<int> cols;
  for (size_t c = 0; c < t.header.size(); ++c) {
    if (static_cast<int>(c) == c_fips) continue;
    names.push_back(t.header[c]);
    cols.push_back(static_cast<int>(c));
  }

  // Sort rows by fips; reject duplicates.
  std::vector<size_t> order(t.rows.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return t.rows[a][static_cast<size_t>(c_fips)] < t.rows[b][static_cast<size_t>(c_fips)];
  });

  std::vector<std::string> fips;
  Eigen::MatrixXd vals(static_cast<Eigen::Index>(t.rows.size()),
                       static_cast<Eigen::Index>(names.size()));
  for (size_t i = 0; i < order.size(); ++i) {
    size_t r = order[i];
    std::string where = path.filename().string() + " row " + std::to_string(r + 1);
    const std::string& f = t.rows[r][static_cast<size_t>(c_fips)];
    if (!fips.empty() && fips.back() == f)
      throw Error(ErrorCode::DuplicateKey, where + ": duplicate fips " + f);
    fips.push_back(f);
    for (size_t c = 0; c < cols.size(); ++c)
      vals(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = csv::parse_double(
          t.rows[r][static_cast<size_t>(cols[c])], where + " col " + names[c]);
  }
  return CovariateTable(std::move(fips), std::move(names), std::move(vals));
}

}  // namespace partisan::core
