#include "partisan/exposure/exposure.hpp"

#include <cmath>
#include <limits>

#include "partisan/common/csv.hpp"
#include "partisan/common/error.hpp"

namespace partisan::exposure {

using core::ConnectivityNetwork;

std::vector<double> partisan_exposure(const ConnectivityNetwork& net,
                                      const std::vector<double>& shares,
                                      bool exclude_self) {
  const size_t n = net.size();
  if (shares.size() != n)
    throw Error(ErrorCode::Validation, "partisan_exposure: share vector length mismatch");
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    double total = net.row_sum(static_cast<int>(i), exclude_self);
    if (total <= 0.0)
      throw Error(ErrorCode::IsolatedCounty,
                  "partisan_exposure: county " + net.county_index()[i] +
                      " has zero total connection weight");
    double acc = 0.0;
    net.for_each_in_row(static_cast<int>(i), [&](int j, double w) {
      if (exclude_self && j == static_cast<int>(i)) return;
      acc += shares[static_cast<size_t>(j)] * w;
    });
    out[i] = acc / total;
  }
  return out;
}

double residential_exposure_rep(double p_rep_given_dem, double p_dem_given_rep,
                                double p_dem) {
  for (double v : {p_rep_given_dem, p_dem_given_rep, p_dem})
    if (v < 0.0 || v > 1.0)
      throw Error(ErrorCode::Validation, "residential_exposure: input outside [0,1]");
  if (p_dem_given_rep == 0.0)
    throw Error(ErrorCode::DivisionByZero, "residential_exposure: P(D|R) = 0");
  return p_rep_given_dem * p_dem / p_dem_given_rep;
}

double residential_exposure_dem(double p_dem_given_rep, double p_rep_given_dem,
                                double p_rep) {
  for (double v : {p_dem_given_rep, p_rep_given_dem, p_rep})
    if (v < 0.0 || v > 1.0)
      throw Error(ErrorCode::Validation, "residential_exposure: input outside [0,1]");
  if (p_rep_given_dem == 0.0)
    throw Error(ErrorCode::DivisionByZero, "residential_exposure: P(R|D) = 0");
  return p_dem_given_rep * p_rep / p_rep_given_dem;
}

double partisan_segregation(double pe_rep, double pe_dem) {
  if (pe_rep < 0.0 || pe_rep > 1.0 || pe_dem < 0.0 || pe_dem > 1.0)
    throw Error(ErrorCode::Validation, "partisan_segregation: exposure outside [0,1]");
  return (pe_rep - pe_dem + 1.0) / 2.0;
}

std::vector<double> network_diversity(const ConnectivityNetwork& net) {
  const size_t n = net.size();
  if (n < 2)
    throw Error(ErrorCode::Degenerate, "network_diversity: needs at least two counties");
  const double log_k = std::log(static_cast<double>(n));
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    double total = net.row_sum(static_cast<int>(i));
    if (total <= 0.0)
      throw Error(ErrorCode::IsolatedCounty,
                  "network_diversity: county " + net.county_index()[i] +
                      " has zero total connection weight");
    double entropy = 0.0;
    net.for_each_in_row(static_cast<int>(i), [&](int, double w) {
      if (w <= 0.0) return;
      double q = w / total;
      entropy -= q * std::log(q);
    });
    out[i] = entropy / log_k;
  }
  return out;
}

std::vector<double> extroversion(const ConnectivityNetwork& net) {
  const size_t n = net.size();
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    double internal = net.coeff(static_cast<int>(i), static_cast<int>(i));
    if (internal <= 0.0)
      throw Error(ErrorCode::DivisionByZero,
                  "extroversion: county " + net.county_index()[i] +
                      " has zero internal probability");
    double external = net.row_sum(static_cast<int>(i), /*exclude_diagonal=*/true);
    out[i] = external / internal;
  }
  return out;
}

ExposureTable network_exposure_table(const std::string& dimension,
                                     const ConnectivityNetwork& net,
                                     const std::vector<double>& shares_dem,
                                     const std::vector<double>& shares_rep,
                                     bool exclude_self) {
  ExposureTable t;
  t.dimension = dimension;
  t.fips = net.county_index();
  t.pe_dem = partisan_exposure(net, shares_dem, exclude_self);
  t.pe_rep = partisan_exposure(net, shares_rep, exclude_self);
  t.segregation.resize(t.fips.size());
  for (size_t i = 0; i < t.fips.size(); ++i)
    t.segregation[i] = partisan_segregation(t.pe_rep[i], t.pe_dem[i]);
  t.diversity = network_diversity(net);
  t.extroversion = extroversion(net);
  return t;
}

ExposureTable residential_exposure_table(const std::vector<std::string>& fips,
                                         const std::vector<double>& p_rep_given_dem,
                                         const std::vector<double>& p_dem_given_rep,
                                         const std::vector<double>& p_dem,
                                         const std::vector<double>& p_rep) {
  const size_t n = fips.size();
  if (p_rep_given_dem.size() != n || p_dem_given_rep.size() != n ||
      p_dem.size() != n || p_rep.size() != n)
    throw Error(ErrorCode::Validation, "residential_exposure_table: length mismatch");
  ExposureTable t;
  t.dimension = "residential";
  t.fips = fips;
  t.pe_dem.resize(n);
  t.pe_rep.resize(n);
  t.segregation.resize(n);
  t.diversity.assign(n, std::numeric_limits<double>::quiet_NaN());
  t.extroversion.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (size_t i = 0; i < n; ++i) {
    t.pe_rep[i] = residential_exposure_rep(p_rep_given_dem[i], p_dem_given_rep[i], p_dem[i]);
    t.pe_dem[i] = residential_exposure_dem(p_dem_given_rep[i], p_rep_given_dem[i], p_rep[i]);
    double pr = std::min(1.0, t.pe_rep[i]);
    double pd = std::min(1.0, t.pe_dem[i]);
    t.segregation[i] = partisan_segregation(pr, pd);
  }
  return t;
}

void write_exposure_csv(const ExposureTable& table, const std::filesystem::path& path) {
  csv::Writer w({"fips", "pe_dem", "pe_rep", "segregation", "diversity", "extroversion"});
  for (size_t i = 0; i < table.size(); ++i) {
    w.add_row();
    w.cell(table.fips[i]);
    w.cell(table.pe_dem[i]);
    w.cell(table.pe_rep[i]);
    w.cell(table.segregation[i]);
    w.cell(table.diversity[i]);
    w.cell(table.extroversion[i]);
  }
  w.write(path);
}

ExposureTable read_exposure_csv(const std::filesystem::path& path) {
  auto t = csv::read_file(path);
  int c_fips = t.require_column("fips");
  int c_pd = t.require_column("pe_dem");
  int c_pr = t.require_column("pe_rep");
  int c_seg = t.require_column("segregation");
  int c_div = t.require_column("diversity");
  int c_ext = t.require_column("extroversion");
  ExposureTable out;
  std::string stem = path.stem().string();
  if (auto pos = stem.find('_'); pos != std::string::npos)
    out.dimension = stem.substr(pos + 1);
  for (size_t r = 0; r < t.rows.size(); ++r) {
    std::string where = path.filename().string() + " row " + std::to_string(r + 1);
    out.fips.push_back(t.rows[r][static_cast<size_t>(c_fips)]);
    out.pe_dem.push_back(csv::parse_double(t.rows[r][static_cast<size_t>(c_pd)], where));
    out.pe_rep.push_back(csv::parse_double(t.rows[r][static_cast<size_t>(c_pr)], where));
    out.segregation.push_back(csv::parse_double(t.rows[r][static_cast<size_t>(c_seg)], where));
    out.diversity.push_back(csv::parse_double(t.rows[r][static_cast<size_t>(c_div)], where));
    out.extroversion.push_back(csv::parse_double(t.rows[r][static_cast<size_t>(c_ext)], where));
  }
  return out;
}

}  // namespace partisan::exposure
