#include "partisan/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "partisan/common/error.hpp"

namespace partisan::core {

void validate_county(const CountyRecord& rec, const std::string& where) {
  if (rec.fips.size() != 5 ||
      !std::all_of(rec.fips.begin(), rec.fips.end(),
                   [](char c) { return c >= '0' && c <= '9'; }))
    throw Error(ErrorCode::Validation, where + ": fips must be 5 digits, got '" + rec.fips + "'");
  if (!(rec.lat >= -90.0 && rec.lat <= 90.0))
    throw Error(ErrorCode::Validation, where + ": latitude out of range");
  if (!(rec.lon > -180.0 && rec.lon <= 180.0))
    throw Error(ErrorCode::Validation, where + ": longitude out of range");
  if (rec.population < 1)
    throw Error(ErrorCode::Validation, where + ": population must be >= 1");
  if (rec.rucc < 1 || rec.rucc > 9)
    throw Error(ErrorCode::Validation, where + ": rucc must be in 1..9");
}

CountyTable::CountyTable(std::vector<CountyRecord> rows) : rows_(std::move(rows)) {
  std::sort(rows_.begin(), rows_.end(),
            [](const CountyRecord& a, const CountyRecord& b) { return a.fips < b.fips; });
  for (size_t i = 0; i < rows_.size(); ++i) {
    validate_county(rows_[i], "county " + rows_[i].fips);
    if (i > 0 && rows_[i].fips == rows_[i - 1].fips)
      throw Error(ErrorCode::DuplicateKey, "duplicate fips " + rows_[i].fips);
    index_.emplace(rows_[i].fips, static_cast<int>(i));
  }
}

int CountyTable::index_of(const std::string& fips) const {
  auto it = index_.find(fips);
  return it == index_.end() ? -1 : it->second;
}

std::vector<std::string> CountyTable::fips_list() const {
  std::vector<std::string> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.fips);
  return out;
}

const char* network_kind_name(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::colocation: return "colocation";
    case NetworkKind::friendship: return "friendship";
    case NetworkKind::commuting: return "commuting";
    case NetworkKind::custom: return "custom";
  }
  return "custom";
}

NetworkKind network_kind_from_name(const std::string& name) {
  if (name == "colocation") return NetworkKind::colocation;
  if (name == "friendship") return NetworkKind::friendship;
  if (name == "commuting") return NetworkKind::commuting;
  if (name == "custom") return NetworkKind::custom;
  throw Error(ErrorCode::Validation, "unknown network kind '" + name + "'");
}

ConnectivityNetwork::ConnectivityNetwork(std::vector<std::string> county_index,
                                         NetworkKind kind,
                                         const std::vector<Eigen::Triplet<double>>& triplets)
    : county_index_(std::move(county_index)), kind_(kind) {
  const int n = static_cast<int>(county_index_.size());
  for (const auto& t : triplets) {
    if (t.row() < 0 || t.row() >= n || t.col() < 0 || t.col() >= n)
      throw Error(ErrorCode::Validation, "network triplet index out of range");
    if (!(t.value() >= 0.0) || !std::isfinite(t.value()))
      throw Error(ErrorCode::Validation, "network weights must be finite and >= 0");
  }
  dense_storage_ = n <= kDenseLimit;
  if (dense_storage_) {
    dense_ = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : triplets) dense_(t.row(), t.col()) += t.value();
  } else {
    sparse_.resize(n, n);
    sparse_.setFromTriplets(triplets.begin(), triplets.end());  // sums duplicates
    sparse_.makeCompressed();
  }
}

double ConnectivityNetwork::coeff(int i, int j) const {
  return dense_storage_ ? dense_(i, j) : sparse_.coeff(i, j);
}

double ConnectivityNetwork::row_sum(int i, bool exclude_diagonal) const {
  double s = 0.0;
  if (dense_storage_) {
    s = dense_.row(i).sum();
  } else {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sparse_, i); it; ++it)
      s += it.value();
  }
  if (exclude_diagonal) s -= coeff(i, i);
  return s;
}

void ConnectivityNetwork::for_each_in_row(int i, const std::function<void(int, double)>& f) const {
  if (dense_storage_) {
    for (int j = 0; j < dense_.cols(); ++j)
      if (dense_(i, j) != 0.0) f(j, dense_(i, j));
  } else {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sparse_, i); it; ++it)
      f(static_cast<int>(it.col()), it.value());
  }
}

ConnectivityNetwork ConnectivityNetwork::restricted_to(const std::vector<int>& keep) const {
  std::vector<int> inverse(size(), -1);
  std::vector<std::string> new_index;
  new_index.reserve(keep.size());
  for (size_t a = 0; a < keep.size(); ++a) {
    inverse[static_cast<size_t>(keep[a])] = static_cast<int>(a);
    new_index.push_back(county_index_[static_cast<size_t>(keep[a])]);
  }
  std::vector<Eigen::Triplet<double>> trips;
  for (int old_i : keep) {
    int new_i = inverse[static_cast<size_t>(old_i)];
    for_each_in_row(old_i, [&](int old_j, double w) {
      int new_j = inverse[static_cast<size_t>(old_j)];
      if (new_j >= 0) trips.emplace_back(new_i, new_j, w);
    });
  }
  return ConnectivityNetwork(std::move(new_index), kind_, trips);
}

Eigen::MatrixXd ConnectivityNetwork::to_dense() const {
  if (dense_storage_) return dense_;
  return Eigen::MatrixXd(sparse_);
}

ElectionPanel::ElectionPanel(const std::vector<Row>& rows) {
  std::set<int> year_set;
  std::set<std::string> fips_set;
  for (const auto& r : rows) {
    year_set.insert(r.year);
    fips_set.insert(r.fips);
  }
  years_.assign(year_set.begin(), year_set.end());
  fips_.assign(fips_set.begin(), fips_set.end());
  for (size_t i = 0; i < fips_.size(); ++i) fips_index_.emplace(fips_[i], static_cast<int>(i));

  const auto n = static_cast<Eigen::Index>(fips_.size());
  const auto y = static_cast<Eigen::Index>(years_.size());
  dem_.setZero(n, y);
  rep_.setZero(n, y);
  present_.setConstant(n, y, false);
  for (size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    std::string where = "votes row " + std::to_string(k + 1);
    if (!(r.dem_share >= 0.0 && r.dem_share <= 1.0) ||
        !(r.rep_share >= 0.0 && r.rep_share <= 1.0))
      throw Error(ErrorCode::Validation, where + ": shares must be in [0,1]");
    if (r.dem_share + r.rep_share > 1.0 + 1e-12)
      throw Error(ErrorCode::Validation, where + ": dem_share + rep_share exceeds 1");
    int i = fips_index_.at(r.fips);
    int j = year_index(r.year);
    if (present_(i, j))
      throw Error(ErrorCode::DuplicateKey,
                  where + ": duplicate (" + r.fips + ", " + std::to_string(r.year) + ")");
    dem_(i, j) = r.dem_share;
    rep_(i, j) = r.rep_share;
    present_(i, j) = true;
  }
}

int ElectionPanel::year_index(int year) const {
  auto it = std::lower_bound(years_.begin(), years_.end(), year);
  if (it == years_.end() || *it != year) return -1;
  return static_cast<int>(it - years_.begin());
}

bool ElectionPanel::has(const std::string& fips, int year) const {
  auto it = fips_index_.find(fips);
  int j = year_index(year);
  return it != fips_index_.end() && j >= 0 && present_(it->second, j);
}

double ElectionPanel::dem_share(const std::string& fips, int year) const {
  auto it = fips_index_.find(fips);
  int j = year_index(year);
  if (it == fips_index_.end() || j < 0 || !present_(it->second, j))
    throw Error(ErrorCode::MissingObservation,
                "no observation for (" + fips + ", " + std::to_string(year) + ")");
  return dem_(it->second, j);
}

double ElectionPanel::rep_share(const std::string& fips, int year) const {
  auto it = fips_index_.find(fips);
  int j = year_index(year);
  if (it == fips_index_.end() || j < 0 || !present_(it->second, j))
    throw Error(ErrorCode::MissingObservation,
                "no observation for (" + fips + ", " + std::to_string(year) + ")");
  return rep_(it->second, j);
}

ElectionPanel ElectionPanel::restricted_to(const std::vector<std::string>& fips) const {
  std::vector<Row> rows;
  for (const auto& f : fips) {
    auto it = fips_index_.find(f);
    if (it == fips_index_.end()) continue;
    for (size_t j = 0; j < years_.size(); ++j)
      if (present_(it->second, static_cast<Eigen::Index>(j)))
        rows.push_back({f, years_[j], dem_(it->second, static_cast<Eigen::Index>(j)),
                        rep_(it->second, static_cast<Eigen::Index>(j))});
  }
  return ElectionPanel(rows);
}

CovariateTable::CovariateTable(std::vector<std::string> fips, std::vector<std::string> names,
                               Eigen::MatrixXd values)
    : fips_(std::move(fips)), names_(std::move(names)), values_(std::move(values)) {
  if (values_.rows() != static_cast<Eigen::Index>(fips_.size()) ||
      values_.cols() != static_cast<Eigen::Index>(names_.size()))
    throw Error(ErrorCode::Validation, "covariate table shape mismatch");
  for (size_t i = 0; i < fips_.size(); ++i) {
    if (i > 0 && fips_[i] <= fips_[i - 1])
      throw Error(ErrorCode::Validation, "covariate fips must be sorted and unique");
    fips_index_.emplace(fips_[i], static_cast<int>(i));
  }
}

bool CovariateTable::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Eigen::VectorXd CovariateTable::column(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end())
    throw Error(ErrorCode::Validation, "no covariate named '" + name + "'");
  return values_.col(it - names_.begin());
}

double CovariateTable::value(const std::string& fips, const std::string& name) const {
  auto it = fips_index_.find(fips);
  if (it == fips_index_.end())
    throw Error(ErrorCode::UnknownCounty, "no covariates for fips " + fips);
  auto c = std::find(names_.begin(), names_.end(), name);
  if (c == names_.end())
    throw Error(ErrorCode::Validation, "no covariate named '" + name + "'");
  return values_(it->second, c - names_.begin());
}

CovariateTable CovariateTable::restricted_to(const std::vector<std::string>& fips) const {
  std::vector<std::string> kept;
  std::vector<int> rows;
  for (const auto& f : fips) {
    auto it = fips_index_.find(f);
    if (it != fips_index_.end()) {
      kept.push_back(f);
      rows.push_back(it->second);
    }
  }
  Eigen::MatrixXd vals(static_cast<Eigen::Index>(rows.size()), values_.cols());
  for (size_t i = 0; i < rows.size(); ++i) vals.row(static_cast<Eigen::Index>(i)) = values_.row(rows[i]);
  return CovariateTable(std::move(kept), names_, std::move(vals));
}

AlignedDataset align_datasets(const CountyTable& counties,
                              const std::map<std::string, ConnectivityNetwork>& networks,
                              const ElectionPanel& panel,
                              const CovariateTable& covariates) {
  std::set<std::string> common;
  for (const auto& r : counties.rows()) common.insert(r.fips);

  auto intersect = [&common](const std::vector<std::string>& fips) {
    std::set<std::string> s(fips.begin(), fips.end());
    for (auto it = common.begin(); it != common.end();)
      it = s.count(*it) ? std::next(it) : common.erase(it);
  };
  for (const auto& [name, net] : networks) intersect(net.county_index());
  if (panel.counties() > 0) intersect(panel.fips_list());
  if (!covariates.fips_list().empty()) intersect(covariates.fips_list());

  if (common.empty())
    throw Error(ErrorCode::EmptyJoin, "no county appears in every input");

  AlignedDataset out;
  // Report each dropped fips with the sources that lacked it.
  {
    std::set<std::string> all;
    for (const auto& r : counties.rows()) all.insert(r.fips);
    for (const auto& [name, net] : networks)
      for (const auto& f : net.county_index()) all.insert(f);
    for (const auto& f : panel.fips_list()) all.insert(f);
    for (const auto& f : covariates.fips_list()) all.insert(f);
    for (const auto& f : all) {
      if (common.count(f)) continue;
      std::string missing_from;
      auto note = [&](bool present, const std::string& src) {
        if (!present) missing_from += missing_from.empty() ? src : "," + src;
      };
      note(counties.index_of(f) >= 0, "counties");
      for (const auto& [name, net] : networks) {
        bool present = std::find(net.county_index().begin(), net.county_index().end(), f) !=
                       net.county_index().end();
        note(present, name);
      }
      if (panel.counties() > 0)
        note(std::binary_search(panel.fips_list().begin(), panel.fips_list().end(), f), "votes");
      if (!covariates.fips_list().empty())
        note(std::binary_search(covariates.fips_list().begin(), covariates.fips_list().end(), f),
             "covariates");
      out.dropped.emplace_back(f, missing_from);
    }
  }

  std::vector<CountyRecord> kept;
  for (const auto& r : counties.rows())
    if (common.count(r.fips)) kept.push_back(r);
  out.counties = CountyTable(std::move(kept));
  const auto order = out.counties.fips_list();

  for (const auto& [name, net] : networks) {
    std::map<std::string, int> pos;
    const auto& idx = net.county_index();
    for (size_t i = 0; i < idx.size(); ++i) pos.emplace(idx[i], static_cast<int>(i));
    std::vector<int> keep;
    keep.reserve(order.size());
    for (const auto& f : order) keep.push_back(pos.at(f));
    out.networks.emplace(name, net.restricted_to(keep));
  }
  out.panel = panel.restricted_to(order);
  out.covariates = covariates.restricted_to(order);
  return out;
}

}  // namespace partisan::core
