#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace partisan::core {

using LogFn = std::function<void(const std::string&)>;

struct CountyRecord {
  std::string fips;  // 5-digit identifier
  double lat = 0.0;
  double lon = 0.0;
  long long population = 0;
  int rucc = 0;  // 1..9
};

void validate_county(const CountyRecord& rec, const std::string& where);

// Ordered by fips; fips unique.
class CountyTable {
 public:
  CountyTable() = default;
  explicit CountyTable(std::vector<CountyRecord> rows);  // sorts + validates

  size_t size() const { return rows_.size(); }
  const CountyRecord& operator[](size_t i) const { return rows_[i]; }
  const std::vector<CountyRecord>& rows() const { return rows_; }
  int index_of(const std::string& fips) const;  // -1 if absent
  std::vector<std::string> fips_list() const;

 private:
  std::vector<CountyRecord> rows_;
  std::map<std::string, int> index_;
};

enum class NetworkKind { colocation, friendship, commuting, custom };

const char* network_kind_name(NetworkKind kind);
NetworkKind network_kind_from_name(const std::string& name);

// N x N nonnegative connection weights over an ordered county index.
// Self-loops are allowed. Dense storage up to kDenseLimit counties, sparse
// triplets above; both sides expose the same accessors.
class ConnectivityNetwork {
 public:
  static constexpr int kDenseLimit = 5000;

  ConnectivityNetwork() = default;
  // Triplets are (row, col, weight), indices into `county_index`. Duplicate
  // (row, col) pairs are summed.
  ConnectivityNetwork(std::vector<std::string> county_index, NetworkKind kind,
                      const std::vector<Eigen::Triplet<double>>& triplets);

  size_t size() const { return county_index_.size(); }
  NetworkKind kind() const { return kind_; }
  const std::vector<std::string>& county_index() const { return county_index_; }

  double coeff(int i, int j) const;
  double row_sum(int i, bool exclude_diagonal = false) const;
  // f(j, weight) for every structurally stored entry of row i.
  void for_each_in_row(int i, const std::function<void(int, double)>& f) const;

  // Same network restricted to `keep` (indices into the current ordering),
  // with the county index relabeled accordingly.
  ConnectivityNetwork restricted_to(const std::vector<int>& keep) const;

  Eigen::MatrixXd to_dense() const;

 private:
  std::vector<std::string> county_index_;
  NetworkKind kind_ = NetworkKind::custom;
  bool dense_storage_ = true;
  Eigen::MatrixXd dense_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> sparse_;
};

// Per (fips, year) Democratic/Republican vote shares.
class ElectionPanel {
 public:
  ElectionPanel() = default;
  struct Row {
    std::string fips;
    int year;
    double dem_share;
    double rep_share;
  };
  explicit ElectionPanel(const std::vector<Row>& rows);  // validates

  const std::vector<int>& years() const { return years_; }
  const std::vector<std::string>& fips_list() const { return fips_; }
  size_t counties() const { return fips_.size(); }
  bool has(const std::string& fips, int year) const;
  double dem_share(const std::string& fips, int year) const;
  double rep_share(const std::string& fips, int year) const;

  ElectionPanel restricted_to(const std::vector<std::string>& fips) const;

 private:
  int year_index(int year) const;
  std::vector<int> years_;             // ascending
  std::vector<std::string> fips_;      // ascending
  std::map<std::string, int> fips_index_;
  Eigen::MatrixXd dem_, rep_;          // counties x years
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> present_;
};

// Named real-valued covariates keyed by fips.
class CovariateTable {
 public:
  CovariateTable() = default;
  CovariateTable(std::vector<std::string> fips, std::vector<std::string> names,
                 Eigen::MatrixXd values);

  const std::vector<std::string>& fips_list() const { return fips_; }
  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& values() const { return values_; }
  bool has_column(const std::string& name) const;
  Eigen::VectorXd column(const std::string& name) const;
  double value(const std::string& fips, const std::string& name) const;

  CovariateTable restricted_to(const std::vector<std::string>& fips) const;

 private:
  std::vector<std::string> fips_;  // ascending
  std::vector<std::string> names_;
  Eigen::MatrixXd values_;  // counties x names
  std::map<std::string, int> fips_index_;
};

struct AlignedDataset {
  CountyTable counties;
  std::map<std::string, ConnectivityNetwork> networks;  // keyed by kind name
  ElectionPanel panel;
  CovariateTable covariates;
  // fips removed from at least one source, with the sources that lacked them
  std::vector<std::pair<std::string, std::string>> dropped;
};

// Restricts every input to the intersection of fips sets and reindexes all
// matrices/vectors consistently. Throws EmptyJoin if nothing survives.
// Re-aligning an aligned dataset is a no-op.
AlignedDataset align_datasets(const CountyTable& counties,
                              const std::map<std::string, ConnectivityNetwork>& networks,
                              const ElectionPanel& panel,
                              const CovariateTable& covariates);

}  // namespace partisan::core
