#include "partisan/pipeline/synth.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "partisan/common/csv.hpp"
#include "partisan/common/error.hpp"
#include "partisan/common/rng.hpp"

namespace partisan::pipeline {

namespace {

std::string lattice_fips(int i) {
  std::string s = std::to_string(10001 + i);
  return s;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

SarSample generate_sar(const SyntheticSpec& spec) {
  if (spec.side < 2)
    throw Error(ErrorCode::Validation, "generate_sar: side must be >= 2");
  if (!(std::abs(spec.rho) < 1.0))
    throw Error(ErrorCode::Validation, "generate_sar: |rho| must be < 1");
  if (spec.sigma < 0.0)
    throw Error(ErrorCode::Validation, "generate_sar: sigma must be >= 0");

  const int n = spec.side * spec.side;
  const int p = static_cast<int>(spec.beta.size());

  std::vector<core::CountyRecord> rows;
  rows.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    core::CountyRecord rec;
    rec.fips = lattice_fips(i);
    rec.lat = 34.0 + 0.2 * static_cast<double>(i / spec.side);
    rec.lon = -98.0 + 0.2 * static_cast<double>(i % spec.side);
    rec.population = 10000;
    rec.rucc = 1;
    rows.push_back(rec);
  }

  SarSample sample;
  sample.counties = core::CountyTable(std::move(rows));
  sample.w = spatial::knn_weights(sample.counties, spec.k);

  Rng x_rng = Rng::for_stage(spec.seed, "generate_sar:x");
  sample.x.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) sample.x(i, j) = x_rng.normal();

  Rng e_rng = Rng::for_stage(spec.seed, "generate_sar:noise");
  Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, spec.alpha);
  for (int j = 0; j < p; ++j) rhs += spec.beta[static_cast<size_t>(j)] * sample.x.col(j);
  for (int i = 0; i < n; ++i) rhs(i) += e_rng.normal(0.0, spec.sigma);

  Eigen::SparseMatrix<double> a(n, n);
  {
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, 1.0);
    for (int i = 0; i < sample.w.w.outerSize(); ++i)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sample.w.w, i);
           it; ++it)
        trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                           -spec.rho * it.value());
    a.setFromTriplets(trips.begin(), trips.end());
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalError, "generate_sar: (I - rho W) is singular");
  sample.y = lu.solve(rhs);
  return sample;
}

void write_fixture(const std::filesystem::path& dir, uint64_t seed) {
  std::filesystem::create_directories(dir);
  const int side = 10;
  const int n_main = side * side;
  const int n_all = n_main + 1;  // last county is missing from friendship edges

  Rng geo = Rng::for_stage(seed, "fixture:geo");
  Rng pop_rng = Rng::for_stage(seed, "fixture:pop");
  Rng field = Rng::for_stage(seed, "fixture:field");

  std::vector<double> lat(n_all), lon(n_all), urban(n_all), lean(n_all);
  std::vector<long long> pop(n_all);
  std::vector<int> rucc(n_all);
  for (int i = 0; i < n_all; ++i) {
    int r = i / side, c = i % side;
    if (i < n_main) {
      lat[i] = 34.0 + 0.4 * r + geo.uniform(-0.05, 0.05);
      lon[i] = -98.0 + 0.4 * c + geo.uniform(-0.05, 0.05);
    } else {
      lat[i] = 38.5 + geo.uniform(-0.05, 0.05);
      lon[i] = -93.3 + geo.uniform(-0.05, 0.05);
    }
    pop[i] = std::clamp<long long>(
        static_cast<long long>(std::lround(std::exp(pop_rng.normal(10.8, 0.8)))), 5000,
        2000000);
    urban[i] = clamp01(0.5 + 0.35 * std::sin(0.9 * r + 0.4) * std::cos(1.1 * c + 0.2) +
                       0.18 * field.normal());
    rucc[i] = 1 + static_cast<int>(std::floor((1.0 - urban[i]) * 8.9999));
    lean[i] = std::clamp(0.5 + 0.26 * std::sin(0.6 * r + 0.3) * std::cos(0.5 * c + 0.7) +
                             0.20 * (urban[i] - 0.5) + 0.07 * field.normal(),
                         0.08, 0.92);
  }

  {
    csv::Writer w({"fips", "lat", "lon", "pop", "rucc"});
    for (int i = 0; i < n_all; ++i) {
      w.add_row();
      w.cell(lattice_fips(i));
      w.cell(lat[i]);
      w.cell(lon[i]);
      w.cell(static_cast<long long>(pop[i]));
      w.cell(static_cast<long long>(rucc[i]));
    }
    w.write(dir / "counties.csv");
  }

  {
    Rng votes = Rng::for_stage(seed, "fixture:votes");
    const std::vector<std::pair<int, double>> years = {
        {2008, 0.035}, {2012, 0.012}, {2016, -0.028}, {2020, 0.022}};
    csv::Writer w({"fips", "year", "dem_share", "rep_share"});
    for (int i = 0; i < n_all; ++i) {
      for (const auto& [year, shock] : years) {
        double f = std::clamp(lean[i] + shock + votes.normal(0.0, 0.018), 0.03, 0.97);
        double third = 0.02 + 0.02 * votes.uniform();
        w.add_row();
        w.cell(lattice_fips(i));
        w.cell(static_cast<long long>(year));
        w.cell(f * (1.0 - third));
        w.cell((1.0 - f) * (1.0 - third));
      }
    }
    w.write(dir / "votes.csv");
  }

  auto dist_km = [&](int i, int j) {
    return spatial::haversine_km(lat[static_cast<size_t>(i)], lon[static_cast<size_t>(i)],
                                 lat[static_cast<size_t>(j)], lon[static_cast<size_t>(j)]);
  };

  {
    // Colocation probabilities: strong self-loop, exponential distance decay.
    Rng coloc = Rng::for_stage(seed, "fixture:colocation");
    csv::Writer w({"src_fips", "dst_fips", "weight"});
    for (int i = 0; i < n_all; ++i) {
      w.add_row();
      w.cell(lattice_fips(i));
      w.cell(lattice_fips(i));
      w.cell(0.35 + 0.3 * urban[i]);
      for (int j = 0; j < n_all; ++j) {
        if (j == i) continue;
        double d = dist_km(i, j);
        if (d > 130.0) continue;
        double p = 0.01 * std::exp(-d / 45.0) * (1.0 + 0.2 * coloc.uniform());
        w.add_row();
        w.cell(lattice_fips(i));
        w.cell(lattice_fips(j));
        w.cell(p);
      }
    }
    w.write(dir / "edges_colocation.csv");
  }

  {
    // Friendship SCI counts over the first n_main counties only; dividing by
    // pop_i * pop_j later recovers a smooth probability surface.
    Rng fr = Rng::for_stage(seed, "fixture:friendship");
    csv::Writer w({"src_fips", "dst_fips", "weight"});
    for (int i = 0; i < n_main; ++i) {
      for (int j = 0; j < n_main; ++j) {
        double p;
        if (i == j) {
          p = 4e-6 * (1.0 + urban[i]);
        } else {
          double d = dist_km(i, j);
          p = 3e-6 * std::exp(-d / 150.0) * (1.0 + 0.25 * fr.uniform());
        }
        double sci = p * static_cast<double>(pop[i]) * static_cast<double>(pop[j]);
        w.add_row();
        w.cell(lattice_fips(i));
        w.cell(lattice_fips(j));
        w.cell(sci);
      }
    }
    w.write(dir / "edges_friendship.csv");
  }

  {
    // Commuting flows: heavy internal flow, short-range off-diagonal flows.
    Rng cm = Rng::for_stage(seed, "fixture:commuting");
    csv::Writer w({"src_fips", "dst_fips", "weight"});
    for (int i = 0; i < n_all; ++i) {
      w.add_row();
      w.cell(lattice_fips(i));
      w.cell(lattice_fips(i));
      w.cell(0.3 * static_cast<double>(pop[i]));
      for (int j = 0; j < n_all; ++j) {
        if (j == i) continue;
        double d = dist_km(i, j);
        if (d > 90.0) continue;
        double flow = 0.05 * static_cast<double>(pop[i]) * std::exp(-d / 30.0) *
                      (1.0 + 0.2 * cm.uniform());
        w.add_row();
        w.cell(lattice_fips(i));
        w.cell(lattice_fips(j));
        w.cell(flow);
      }
    }
    w.write(dir / "edges_commuting.csv");
  }

  {
    Rng cov = Rng::for_stage(seed, "fixture:covariates");
    csv::Writer w({"fips", "pct_graduated", "pct_urban", "pct_african_american",
                   "pct_unemployed", "pct_hispanic", "res_rep_given_dem",
                   "res_dem_given_rep", "res_p_dem", "res_p_rep"});
    for (int i = 0; i < n_all; ++i) {
      double graduated = clamp01(0.18 + 0.22 * urban[i] + 0.30 * (lean[i] - 0.5) +
                                 0.05 * cov.normal());
      double urb = clamp01(urban[i] + 0.05 * cov.normal());
      double african = clamp01(0.03 + 0.35 * std::max(0.0, lean[i] - 0.45) +
                               0.08 * std::abs(cov.normal()));
      double unemployed = clamp01(0.03 + 0.04 * cov.uniform() + 0.03 * (1.0 - urban[i]));
      double hispanic = clamp01(0.03 + 0.10 * std::abs(cov.normal()));
      double t_dem = std::clamp(0.5 + 0.8 * (lean[i] - 0.5), 0.05, 0.95);
      double t_rep = (1.0 - t_dem) * 0.99;
      double cond = 0.55 + 0.4 * cov.uniform();
      w.add_row();
      w.cell(lattice_fips(i));
      w.cell(graduated);
      w.cell(urb);
      w.cell(african);
      w.cell(unemployed);
      w.cell(hispanic);
      w.cell(cond * t_rep);
      w.cell(cond * t_dem);
      w.cell(t_dem);
      w.cell(t_rep);
    }
    w.write(dir / "covariates.csv");
  }

  {
    std::ofstream out(dir / "config.ini", std::ios::binary);
    if (!out)
      throw Error(ErrorCode::Io, "write_fixture: cannot write " + (dir / "config.ini").string());
    out << "# synthetic fixture configuration\n"
        << "[inputs]\n"
        << "counties = counties.csv\n"
        << "edges_colocation = edges_colocation.csv\n"
        << "edges_friendship = edges_friendship.csv\n"
        << "edges_commuting = edges_commuting.csv\n"
        << "votes = votes.csv\n"
        << "covariates = covariates.csv\n\n"
        << "[analysis]\n"
        << "election_years = 2012,2016,2020\n"
        << "swing_window = 2012\n"
        << "k_sweep = 5,7,10\n"
        << "exclude_self = true\n\n"
        << "[elasticnet]\n"
        << "alphas = 1e-06,1e-05,0.0001,0.001,0.01,0.1\n"
        << "l1_ratios = 0.1,0.5,0.9\n"
        << "folds = 5\n"
        << "train_ratio = 0.7\n"
        << "tol = 1e-09\n"
        << "max_iter = 100000\n\n"
        << "[gbm]\n"
        << "n_trees = 300\n"
        << "learning_rate = 0.1\n"
        << "max_depth = 3\n"
        << "background_rows = 128\n\n"
        << "[run]\n"
        << "seed = " << seed << "\n"
        << "out = out\n";
  }
}

}  // namespace partisan::pipeline
