#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "partisan/common/csv.hpp"
#include "partisan/common/error.hpp"
#include "partisan/common/rng.hpp"
#include "partisan/core/derive.hpp"
#include "partisan/core/loaders.hpp"
#include "partisan/core/types.hpp"
#include "test_support.hpp"

using namespace partisan;
using core::NetworkKind;

namespace {

core::CountyTable three_counties() {
  return core::CountyTable({
      {"01001", 32.5, -86.6, 1000, 2},
      {"01003", 30.7, -87.7, 2000, 4},
      {"01005", 31.9, -85.4, 500, 7},
  });
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e300, 1e-300, 0.0, -0.0, 2.0, -17.25,
                   0.9657142857142857, 6.990439603854076}) {
    std::string s = csv::format_double(v);
    CHECK(csv::parse_double(s, "t") == v);
  }
  CHECK(csv::format_double(2.0) == "2");
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(std::isnan(csv::parse_double("nan", "t")));
}

TEST_CASE("csv parsing rejects malformed numbers with location") {
  CHECK_THROWS_AS(csv::parse_double("1.2.3", "spot"), Error);
  CHECK_THROWS_AS(csv::parse_double("", "spot"), Error);
  CHECK_THROWS_AS(csv::parse_int("12x", "spot"), Error);
  try {
    csv::parse_double("abc", "votes row 4");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("votes row 4") != std::string::npos);
  }
}

TEST_CASE("csv read_file reports structural problems") {
  TempDir td;
  auto good = td.file("good.csv", "a,b\n1,2\n3,4\n");
  auto t = csv::read_file(good);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.rows.size() == 2);
  CHECK(t.require_column("b") == 1);
  CHECK(t.column("missing") == -1);
  CHECK_THROWS_AS(t.require_column("missing"), Error);

  auto ragged = td.file("ragged.csv", "a,b\n1,2\n3\n");
  try {
    csv::read_file(ragged);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(csv::read_file(td.path / "absent.csv"), Error);
  CHECK_THROWS_AS(csv::read_file(td.file("empty.csv", "")), Error);
}

TEST_CASE("csv writer validates row widths and emits trailing newline") {
  csv::Writer w({"x", "y"});
  w.add_row();
  w.cell(1.5);
  w.cell("two");
  CHECK(w.to_string() == "x,y\n1.5,two\n");
  w.add_row();
  w.cell(3);
  TempDir td;
  CHECK_THROWS_AS(w.write(td.path / "bad.csv"), Error);
}

TEST_CASE("county table sorts, indexes, and validates") {
  auto t = three_counties();
  CHECK(t.size() == 3);
  CHECK(t[0].fips == "01001");
  CHECK(t.index_of("01005") == 2);
  CHECK(t.index_of("99999") == -1);

  CHECK_THROWS_AS(core::CountyTable({{"01001", 0, 0, 100, 1},
                                     {"01001", 0, 0, 200, 2}}),
                  Error);
  CHECK_THROWS_AS(core::CountyTable({{"01001", 95.0, 0, 100, 1}}), Error);
  CHECK_THROWS_AS(core::CountyTable({{"01001", 0, 0, 0, 1}}), Error);
  CHECK_THROWS_AS(core::CountyTable({{"01001", 0, 0, 100, 10}}), Error);
  CHECK_THROWS_AS(core::CountyTable({{"123", 0, 0, 100, 1}}), Error);
}

TEST_CASE("load_counties parses and rejects duplicates") {
  TempDir td;
  auto p = td.file("counties.csv",
                   "fips,lat,lon,pop,rucc\n"
                   "01003,30.7,-87.7,2000,4\n"
                   "01001,32.5,-86.6,1000,2\n");
  auto t = core::load_counties(p);
  CHECK(t.size() == 2);
  CHECK(t[0].fips == "01001");
  CHECK(t[1].population == 2000);

  auto dup = td.file("dup.csv",
                     "fips,lat,lon,pop,rucc\n"
                     "01001,0,0,100,1\n"
                     "01001,0,0,100,1\n");
  try {
    core::load_counties(dup);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateKey);
  }
}

TEST_CASE("load_network_edges validates fips and sums duplicates with warning") {
  TempDir td;
  auto counties = three_counties();
  auto p = td.file("edges_colocation.csv",
                   "src_fips,dst_fips,weight\n"
                   "01001,01003,0.25\n"
                   "01001,01003,0.25\n"
                   "01003,01001,0.1\n");
  std::vector<std::string> warnings;
  auto net = core::load_network_edges(p, counties, NetworkKind::colocation,
                                      [&](const std::string& m) { warnings.push_back(m); });
  CHECK(net.coeff(0, 1) == doctest::Approx(0.5));
  CHECK(net.coeff(1, 0) == doctest::Approx(0.1));
  CHECK(net.coeff(2, 2) == 0.0);
  CHECK(warnings.size() == 1);

  auto unknown = td.file("edges_bad.csv",
                         "src_fips,dst_fips,weight\n"
                         "01001,99999,1\n");
  try {
    core::load_network_edges(unknown, counties, NetworkKind::colocation);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownCounty);
  }

  auto negative = td.file("edges_neg.csv",
                          "src_fips,dst_fips,weight\n"
                          "01001,01003,-1\n");
  CHECK_THROWS_AS(
      core::load_network_edges(negative, counties, NetworkKind::colocation), Error);
}

TEST_CASE("connectivity network accessors agree with the dense view") {
  std::vector<Eigen::Triplet<double>> trips{{0, 0, 2.0}, {0, 1, 1.0}, {1, 2, 4.0}};
  core::ConnectivityNetwork net({"01001", "01003", "01005"}, NetworkKind::custom, trips);
  CHECK(net.row_sum(0) == doctest::Approx(3.0));
  CHECK(net.row_sum(0, true) == doctest::Approx(1.0));
  CHECK(net.row_sum(2) == 0.0);
  double acc = 0.0;
  net.for_each_in_row(0, [&](int j, double w) { acc += w * (j + 1); });
  CHECK(acc == doctest::Approx(2.0 * 1 + 1.0 * 2));
  auto dense = net.to_dense();
  CHECK(dense(1, 2) == doctest::Approx(4.0));

  auto sub = net.restricted_to({0, 2});
  CHECK(sub.size() == 2);
  CHECK(sub.county_index() == std::vector<std::string>{"01001", "01005"});
  CHECK(sub.coeff(0, 0) == doctest::Approx(2.0));
  CHECK(sub.coeff(0, 1) == 0.0);
  CHECK(sub.coeff(1, 0) == 0.0);
}

TEST_CASE("election panel lookups and restriction") {
  core::ElectionPanel panel({
      {"01001", 2012, 0.6, 0.4},
      {"01001", 2016, 0.4, 0.6},
      {"01003", 2012, 0.7, 0.3},
      {"01003", 2016, 0.55, 0.45},
  });
  CHECK(panel.years() == std::vector<int>{2012, 2016});
  CHECK(panel.dem_share("01001", 2016) == doctest::Approx(0.4));
  CHECK(panel.has("01003", 2012));
  CHECK_FALSE(panel.has("01003", 2020));
  auto sub = panel.restricted_to({"01003"});
  CHECK(sub.counties() == 1);
  CHECK(sub.rep_share("01003", 2016) == doctest::Approx(0.45));

  CHECK_THROWS_AS(core::ElectionPanel({{"01001", 2012, 1.4, 0.4}}), Error);
  CHECK_THROWS_AS(core::ElectionPanel({{"01001", 2012, 0.6, 0.4},
                                       {"01001", 2012, 0.6, 0.4}}),
                  Error);
}

TEST_CASE("align_datasets drops unmatched fips and is idempotent") {
  core::CountyTable counties({
      {"01001", 32.5, -86.6, 1000, 2},
      {"01003", 30.7, -87.7, 2000, 4},
      {"01005", 31.9, -85.4, 500, 7},
  });
  core::ConnectivityNetwork net({"01001", "01003"}, NetworkKind::colocation,
                                {{0, 1, 1.0}, {1, 0, 1.0}});
  core::ElectionPanel panel({
      {"01001", 2012, 0.6, 0.4},
      {"01003", 2012, 0.7, 0.3},
      {"01005", 2012, 0.5, 0.5},
  });
  core::CovariateTable cov({"01001", "01003", "01005"}, {"urban"},
                           Eigen::MatrixXd{{0.5}, {0.6}, {0.7}});

  auto aligned = core::align_datasets(counties, {{"colocation", net}}, panel, cov);
  CHECK(aligned.counties.size() == 2);
  CHECK(aligned.counties.fips_list() == std::vector<std::string>{"01001", "01003"});
  REQUIRE(aligned.dropped.size() == 1);
  CHECK(aligned.dropped[0].first == "01005");
  CHECK(aligned.dropped[0].second == "colocation");
  CHECK(aligned.networks.at("colocation").size() == 2);
  CHECK(aligned.covariates.fips_list().size() == 2);

  auto again = core::align_datasets(aligned.counties, aligned.networks,
                                    aligned.panel, aligned.covariates);
  CHECK(again.dropped.empty());
  CHECK(again.counties.fips_list() == aligned.counties.fips_list());

  core::ConnectivityNetwork disjoint({"48001"}, NetworkKind::colocation, {});
  CHECK_THROWS_AS(
      core::align_datasets(counties, {{"colocation", disjoint}}, panel, cov), Error);
}

TEST_CASE("probability scaling divides by the population product") {
  CHECK(core::friendship_probability(50.0, 10, 20) == doctest::Approx(0.25));
  CHECK(core::commuting_probability(6.0, 3, 4) == doctest::Approx(0.5));
  CHECK_THROWS_AS(core::friendship_probability(1.0, 0, 5), Error);

  auto counties = three_counties();
  core::ConnectivityNetwork raw(counties.fips_list(), NetworkKind::friendship,
                                {{0, 1, 1000.0}, {2, 0, 250.0}});
  auto prob = core::probability_network(raw, counties);
  CHECK(prob.coeff(0, 1) == doctest::Approx(1000.0 / (1000.0 * 2000.0)));
  CHECK(prob.coeff(2, 0) == doctest::Approx(250.0 / (500.0 * 1000.0)));
  CHECK(prob.coeff(1, 2) == 0.0);
}

TEST_CASE("normal vote averages the requested years") {
  core::ElectionPanel panel({
      {"01001", 2012, 0.60, 0.40},
      {"01001", 2016, 0.50, 0.50},
      {"01001", 2020, 0.40, 0.60},
      {"01003", 2012, 0.30, 0.70},
      {"01003", 2016, 0.20, 0.80},
      {"01003", 2020, 0.10, 0.90},
  });
  auto nv = core::normal_vote(panel, {2012, 2016, 2020});
  REQUIRE(nv.fips.size() == 2);
  CHECK(nv.dem[0] == doctest::Approx(0.5));
  CHECK(nv.rep[0] == doctest::Approx(0.5));
  CHECK(nv.dem[1] == doctest::Approx(0.2));

  try {
    core::normal_vote(panel, {2012, 2024});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingObservation);
  }
}

TEST_CASE("swing classification flags majority flips and rejects ties") {
  core::ElectionPanel panel({
      {"01001", 2012, 0.6, 0.4},
      {"01001", 2016, 0.4, 0.6},
      {"01001", 2020, 0.45, 0.55},
      {"01003", 2012, 0.7, 0.3},
      {"01003", 2016, 0.6, 0.4},
      {"01003", 2020, 0.55, 0.45},
  });
  auto flags = core::classify_swing(panel, {2012, 2016, 2020});
  REQUIRE(flags.size() == 2);
  CHECK(flags[0]);
  CHECK_FALSE(flags[1]);

  core::ElectionPanel tied({
      {"01001", 2012, 0.5, 0.5},
      {"01001", 2016, 0.6, 0.4},
  });
  try {
    core::classify_swing(tied, {2012, 2016});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Tie);
  }
}

TEST_CASE("metro partition splits on rucc 3/4 boundary") {
  core::CountyTable counties({
      {"01001", 0, 0, 100, 1},
      {"01003", 0, 0, 100, 3},
      {"01005", 0, 0, 100, 4},
      {"01007", 0, 0, 100, 9},
  });
  auto part = core::partition_metro(counties);
  CHECK(part.metro == std::vector<int>{0, 1});
  CHECK(part.non_metro == std::vector<int>{2, 3});
}

TEST_CASE("stage-labeled rng streams are stable and independent") {
  auto a1 = Rng::for_stage(7, "elasticnet:dem:split");
  auto a2 = Rng::for_stage(7, "elasticnet:dem:split");
  auto b = Rng::for_stage(7, "elasticnet:rep:split");
  uint64_t x1 = a1.next_u64();
  CHECK(x1 == a2.next_u64());
  CHECK(x1 != b.next_u64());

  Rng u(123);
  for (int i = 0; i < 1000; ++i) {
    double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  Rng s(5);
  std::vector<int> perm{0, 1, 2, 3, 4, 5};
  s.shuffle(perm);
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5});
}
