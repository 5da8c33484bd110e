#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>

#include "stmtmv/baselines.hpp"
#include "stmtmv/config.hpp"
#include "stmtmv/dataset_io.hpp"
#include "stmtmv/errors.hpp"
#include "stmtmv/experiment.hpp"
#include "stmtmv/metrics.hpp"
#include "stmtmv/model_io.hpp"
#include "stmtmv/synthetic.hpp"

using namespace stmtmv;
namespace fs = std::filesystem;

namespace {

std::vector<Eigen::VectorXd> vecs(std::initializer_list<std::vector<double>> vs) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& v : vs) {
    out.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
  }
  return out;
}

// Writes the 3-station, 48-hourly-row fixture used by the loader tests.
struct Fixture {
  fs::path dir;

  explicit Fixture(const std::string& name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir / "series");
    {
      std::ofstream p(dir / "pipes.csv");
      p << "node_a,node_b,length_km,diameter_mm,age_years\n";
      p << "1,2,1.0,300,10\n";
      p << "2,3,2.0,250,5\n";
      p << "1,3,4.0,200,20\n";
    }
    {
      std::ofstream s(dir / "stations.csv");
      s << "station_id,node_id\nS1,1\nS2,2\nS3,3\n";
    }
    {
      std::ofstream g(dir / "geo.csv");
      g << std::setprecision(17);
      g << "station_id,road_len_km,intersections,poi_density,poi_c01,poi_c02,poi_c03,poi_c04,"
           "poi_c05,poi_c06,poi_c07,poi_c08,poi_c09,poi_c10,poi_c11,poi_c12,poi_c13,poi_c14,"
           "poi_c15,poi_c16,poi_c17,poi_c18,poi_c19,poi_c20\n";
      for (int s = 1; s <= 3; ++s) {
        g << "S" << s << "," << 10.0 + s << "," << 30 + 5 * s << "," << 100.0 * s;
        for (int c = 0; c < 20; ++c) g << "," << (s + c);
        g << "\n";
      }
    }
    for (int s = 1; s <= 3; ++s) write_series(s, 48);
  }

  void write_series(int station, int hours) const {
    std::ofstream f(dir / "series" / ("S" + std::to_string(station) + ".csv"));
    f << std::setprecision(17);
    f << "timestamp_iso8601,rc_mgL,turbidity_ntu,ph,flow_m3h,pressure_kPa,temp_C,humidity_pct,"
         "baro_hPa,wind_ms,weather_code\n";
    for (int h = 0; h < hours; ++h) {
      char ts[32];
      std::snprintf(ts, sizeof(ts), "2013-08-%02dT%02d:00:00", 1 + h / 24, h % 24);
      const double rc = 0.5 + 0.1 * std::sin(0.3 * h + station);
      f << ts << "," << rc << "," << 1.2 + 0.05 * station << "," << 7.0 + 0.01 * h << ","
        << 600 + 10 * h % 70 << "," << 300 + station << "," << 24.0 + h % 5 << "," << 55 + h % 10
        << "," << 1003 + h % 4 << "," << 2.5 << "," << h % 5 << "\n";
    }
  }

  ~Fixture() { fs::remove_all(dir); }
};

harness::ExperimentConfig config_from(const std::string& text) {
  return harness::ExperimentConfig::from_kv(harness::KeyValueConfig::from_string(text, "<test>"));
}

}  // namespace

TEST_CASE("rmse: worked values and the two-pass oracle") {
  CHECK(metrics::rmse(vecs({{1, 2}, {3}}), vecs({{1, 2}, {3}})) == 0.0);
  CHECK(metrics::rmse(vecs({{0, 0}}), vecs({{3, 4}})) ==
        doctest::Approx(std::sqrt(25.0 / 2.0)).epsilon(1e-14));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  std::vector<Eigen::VectorXd> y, yhat;
  double ss = 0.0;
  long n = 0;
  for (int l = 0; l < 4; ++l) {
    const int nl = 5 + static_cast<int>(rng() % 10);
    Eigen::VectorXd a(nl), b(nl);
    for (int i = 0; i < nl; ++i) {
      a(i) = gauss(rng);
      b(i) = gauss(rng);
      ss += (a(i) - b(i)) * (a(i) - b(i));
    }
    n += nl;
    y.push_back(a);
    yhat.push_back(b);
  }
  CHECK(metrics::rmse(y, yhat) == doctest::Approx(std::sqrt(ss / n)).epsilon(1e-13));
  CHECK_THROWS_AS(metrics::rmse(vecs({{1, 2}}), vecs({{1}})), InvalidInput);
}

TEST_CASE("accuracy: worked values and term-by-term oracle") {
  CHECK(metrics::accuracy(vecs({{1, 2}, {3}}), vecs({{1, 2}, {3}})) == doctest::Approx(1.0));
  CHECK(metrics::accuracy(vecs({{1, -2, 3}}), vecs({{0, 0, 0}})) ==
        doctest::Approx(0.0).scale(1.0));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss;
  std::vector<Eigen::VectorXd> y, yhat;
  double sum = 0.0;
  const int M = 3;
  for (int l = 0; l < M; ++l) {
    Eigen::VectorXd a(6), b(6);
    for (int i = 0; i < 6; ++i) {
      a(i) = gauss(rng) + 2.0;
      b(i) = gauss(rng);
    }
    double num = 0, den = 0;
    for (int i = 0; i < 6; ++i) {
      num += std::abs(a(i) - b(i));
      den += std::abs(a(i));
    }
    sum += num / den;
    y.push_back(a);
    yhat.push_back(b);
  }
  CHECK(metrics::accuracy(y, yhat) == doctest::Approx(1.0 - sum / M).epsilon(1e-12));
  CHECK_THROWS_AS(metrics::accuracy(vecs({{0, 0}}), vecs({{1, 1}})), InvalidInput);
}

TEST_CASE("generate_synthetic: deterministic bytes for a fixed seed") {
  harness::SyntheticSpec spec;
  spec.stations = 4;
  spec.samples_per_station = 20;
  const auto a = harness::generate_synthetic(spec, 99);
  const auto b = harness::generate_synthetic(spec, 99);
  CHECK(a.planted.W == b.planted.W);
  CHECK(a.coupling.C == b.coupling.C);
  for (int l = 0; l < 4; ++l) {
    CHECK(a.dataset.Xs[l] == b.dataset.Xs[l]);
    CHECK(a.dataset.Xt[l] == b.dataset.Xt[l]);
    CHECK(a.dataset.y[l] == b.dataset.y[l]);
  }
  const auto c = harness::generate_synthetic(spec, 100);
  CHECK(a.planted.W != c.planted.W);
}

TEST_CASE("generate_synthetic: noiseless full-support data is interpolated") {
  harness::SyntheticSpec spec;
  spec.stations = 3;
  spec.spatial_dim = 4;
  spec.temporal_dim = 6;
  spec.support = 10;  // = D
  spec.noise = 0.0;
  spec.samples_per_station = 60;
  const auto synth = harness::generate_synthetic(spec, 7);

  solver::SolverParams p;
  p.tol = 1e-14;
  p.max_iters = 8000;
  const auto report = solver::fista_fit(synth.dataset, synth.coupling, p);
  std::vector<Eigen::VectorXd> pred;
  for (int l = 0; l < 3; ++l) {
    pred.push_back(solver::predict(synth.dataset.full_matrix(l), report.weights.W.col(l)));
  }
  CHECK(metrics::rmse(synth.dataset.y, pred) < 1e-4);
}

TEST_CASE("generate_synthetic: planted-model noise floor") {
  harness::SyntheticSpec spec;  // M=6, Ds=8, Dt=12, s=5, sigma=0.1
  const auto synth = harness::generate_synthetic(spec, 11);
  std::vector<Eigen::VectorXd> bayes;
  for (int l = 0; l < spec.stations; ++l) {
    bayes.push_back(solver::predict(synth.dataset.full_matrix(l), synth.planted.W.col(l)));
  }
  const double floor = metrics::rmse(synth.dataset.y, bayes);
  CHECK(floor > 0.5 * spec.noise);
  CHECK(floor < 1.5 * spec.noise);

  // planted rows outside the support are exactly zero
  int nonzero_rows = 0;
  for (int r = 0; r < synth.planted.W.rows(); ++r) {
    if (!synth.planted.W.row(r).isZero()) ++nonzero_rows;
  }
  CHECK(nonzero_rows == spec.support);
}

TEST_CASE("generate_synthetic: invalid specs rejected") {
  harness::SyntheticSpec spec;
  spec.support = 100;
  CHECK_THROWS_AS(harness::generate_synthetic(spec, 1), InvalidInput);
  spec = harness::SyntheticSpec{};
  spec.noise = -0.1;
  CHECK_THROWS_AS(harness::generate_synthetic(spec, 1), InvalidInput);
  spec = harness::SyntheticSpec{};
  spec.graph_nodes = 2;
  CHECK_THROWS_AS(harness::generate_synthetic(spec, 1), InvalidInput);
}

TEST_CASE("parse_iso8601_utc: round trips and rejects garbage") {
  CHECK(harness::parse_iso8601_utc("1970-01-01T00:00:00", "f", 1) == 0);
  CHECK(harness::parse_iso8601_utc("1970-01-02T03:04:05Z", "f", 1) ==
        86400 + 3 * 3600 + 4 * 60 + 5);
  CHECK(harness::parse_iso8601_utc("2013-08-01T00:00:00", "f", 1) % 3600 == 0);
  CHECK_THROWS_AS(harness::parse_iso8601_utc("2013-13-01T00:00:00", "f", 1), ParseError);
  CHECK_THROWS_AS(harness::parse_iso8601_utc("not-a-time", "f", 1), ParseError);
}

TEST_CASE("load_dataset: fixture sample arithmetic") {
  Fixture fx("stmtmv_fixture_counts");
  auto cfg = config_from("data.kind = csv\ndata.dir = " + fx.dir.string() + "\nseed = 1\n");
  const auto loaded = harness::load_dataset(fx.dir.string(), cfg, 1);

  REQUIRE(loaded.data.tasks() == 3);
  for (int l = 0; l < 3; ++l) {
    // 48 hourly rows: 11 warm-up hours and the final hour are unusable
    CHECK(loaded.data.y[l].size() == 36);
    CHECK(loaded.rc_windows[l].size() == 36);
    CHECK(loaded.rc_windows[l][0].size() == 12);
    for (std::size_t i = 1; i < loaded.sample_times[l].size(); ++i) {
      CHECK(loaded.sample_times[l][i] > loaded.sample_times[l][i - 1]);
    }
  }
  CHECK(loaded.grid_step_minutes == 60);
  CHECK(loaded.skipped_warmup == 3 * 11);
  CHECK(loaded.skipped_target == 3 * 1);
  CHECK(loaded.data.Ds == 24);
  CHECK(loaded.data.Dt == 146);

  // horizon shifts the target: horizon 4 loses three more tail hours
  const auto h4 = harness::load_dataset(fx.dir.string(), cfg, 4);
  CHECK(h4.data.y[0].size() == 33);
}

TEST_CASE("load_dataset: golden first sample equals the op composition") {
  Fixture fx("stmtmv_fixture_golden");
  auto cfg = config_from("data.kind = csv\ndata.dir = " + fx.dir.string() + "\nseed = 1\n");
  const auto loaded = harness::load_dataset(fx.dir.string(), cfg, 1);

  // reconstruct station S1's first usable sample (window = hours 0..11)
  std::vector<double> rc, tu, ph, flow, press;
  for (int h = 0; h <= 11; ++h) {
    rc.push_back(0.5 + 0.1 * std::sin(0.3 * h + 1));
    tu.push_back(1.2 + 0.05 * 1);
    ph.push_back(7.0 + 0.01 * h);
    flow.push_back(600 + 10 * h % 70);
    press.push_back(300 + 1);
  }
  features::TimeSeriesWindow wrc{rc, 60}, wtu{tu, 60}, wph{ph, 60}, wflow{flow, 60},
      wpress{press, 60};
  features::MeteoSnapshot meteo;
  meteo.temperature_c = 24.0 + 11 % 5;
  meteo.humidity_pct = 55 + 11 % 10;
  meteo.barometer_hpa = 1003 + 11 % 4;
  meteo.wind_ms = 2.5;
  meteo.weather_code = 11 % 5;
  const auto temporal =
      features::build_temporal_view(wrc, wtu, wph, wflow, wpress, meteo, 11.0, cfg.features);
  for (int j = 0; j < loaded.data.Dt; ++j) {
    CHECK(loaded.data.Xt[0](0, j) == doctest::Approx(temporal.values[j]).epsilon(1e-12));
  }

  // spatial view: neighbors S2, S3 at hour 11 weighted by the coupling row
  features::GeoSummary geo;
  geo.road_total_length_km = 11.0;
  geo.road_intersections = 35;
  geo.poi_density = 100.0;
  for (int c = 0; c < 20; ++c) geo.poi_counts.push_back(1 + c);
  std::vector<double> neighbor_rc = {0.5 + 0.1 * std::sin(0.3 * 11 + 2),
                                     0.5 + 0.1 * std::sin(0.3 * 11 + 3)};
  std::vector<double> weights = {loaded.coupling.C(0, 1), loaded.coupling.C(0, 2)};
  const auto spatial = features::build_spatial_view(geo, neighbor_rc, weights, cfg.features);
  for (int j = 0; j < loaded.data.Ds; ++j) {
    CHECK(loaded.data.Xs[0](0, j) == doctest::Approx(spatial.values[j]).epsilon(1e-12));
  }

  // target: rc one hour ahead
  CHECK(loaded.data.y[0](0) == doctest::Approx(0.5 + 0.1 * std::sin(0.3 * 12 + 1)).epsilon(1e-12));
}

TEST_CASE("load_dataset: schema violations name the offender") {
  Fixture fx("stmtmv_fixture_schema");
  auto cfg = config_from("data.kind = csv\ndata.dir = " + fx.dir.string() + "\nseed = 1\n");

  SUBCASE("missing geo column") {
    std::ofstream g(fx.dir / "geo.csv");
    g << "station_id,road_len_km,intersections,poi_density,poi_c01\nS1,1,2,3,4\n";
    g.close();
    try {
      harness::load_dataset(fx.dir.string(), cfg, 1);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("poi_c02") != std::string::npos);
    }
  }

  SUBCASE("malformed numeric field names file and line") {
    std::ofstream f(fx.dir / "series" / "S2.csv", std::ios::app);
    f << "2013-08-03T00:00:00,oops,1,7,600,300,24,55,1003,2.5,0\n";
    f.close();
    try {
      harness::load_dataset(fx.dir.string(), cfg, 1);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("S2.csv:50") != std::string::npos);
      CHECK(msg.find("rc_mgL") != std::string::npos);
    }
  }

  SUBCASE("non-monotone timestamps rejected") {
    std::ofstream f(fx.dir / "series" / "S3.csv", std::ios::app);
    f << "2013-08-01T05:00:00,0.5,1,7,600,300,24,55,1003,2.5,0\n";
    f.close();
    CHECK_THROWS_AS(harness::load_dataset(fx.dir.string(), cfg, 1), ParseError);
  }
}

TEST_CASE("load_dataset: gap handling follows the missing-data budget") {
  Fixture fx("stmtmv_fixture_gaps");
  // rewrite S1 with a handful of missing rc fields (under 20% per window)
  {
    std::ofstream f(fx.dir / "series" / "S1.csv");
    f << std::setprecision(17);
    f << "timestamp_iso8601,rc_mgL,turbidity_ntu,ph,flow_m3h,pressure_kPa,temp_C,humidity_pct,"
         "baro_hPa,wind_ms,weather_code\n";
    for (int h = 0; h < 48; ++h) {
      char ts[32];
      std::snprintf(ts, sizeof(ts), "2013-08-%02dT%02d:00:00", 1 + h / 24, h % 24);
      f << ts << ",";
      if (h % 13 == 7) {
        f << "";  // missing rc
      } else {
        f << 0.5 + 0.01 * h;
      }
      f << ",1.2,7.0,600,301,24,55,1003,2.5," << h % 5 << "\n";
    }
  }
  auto cfg = config_from("data.kind = csv\ndata.dir = " + fx.dir.string() + "\nseed = 1\n");
  const auto loaded = harness::load_dataset(fx.dir.string(), cfg, 1);
  // missing targets cost a few samples; surviving windows were forward-filled
  CHECK(loaded.data.y[0].size() < 36);
  CHECK(loaded.data.y[0].size() > 25);
  CHECK(loaded.skipped_target > 3);
  for (const auto& w : loaded.rc_windows[0]) {
    for (double v : w) CHECK(std::isfinite(v));
  }
}

TEST_CASE("prepare_split: chronological and standardized") {
  harness::SyntheticSpec spec;
  spec.stations = 3;
  spec.samples_per_station = 40;
  const auto synth = harness::generate_synthetic(spec, 21);
  const auto prep = harness::prepare_split(synth.dataset, synth.coupling, {}, 0.7, 0.2);

  for (int l = 0; l < 3; ++l) {
    CHECK(prep.train.y[l].size() == 28);
    CHECK(prep.test.y[l].size() == 12);
    CHECK(prep.val.y[l].size() == 5);
    CHECK(prep.train_core.y[l].size() == 23);
  }
  // train columns are z-scored using pooled train statistics
  const int D = prep.train.dim();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(D), sumsq = Eigen::VectorXd::Zero(D);
  long n = 0;
  for (int l = 0; l < 3; ++l) {
    const Eigen::MatrixXd X = prep.train.full_matrix(l);
    sum += X.colwise().sum();
    sumsq += X.array().square().colwise().sum().matrix();
    n += X.rows();
  }
  for (int j = 0; j < D; ++j) {
    const double mean = sum(j) / n;
    const double var = sumsq(j) / n - mean * mean;
    CHECK(std::abs(mean) < 1e-10);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("model file: JSON round trip preserves prediction behavior") {
  harness::SyntheticSpec spec;
  spec.stations = 2;
  spec.samples_per_station = 30;
  const auto synth = harness::generate_synthetic(spec, 31);
  const auto prep = harness::prepare_split(synth.dataset, synth.coupling, {}, 0.7, 0.2);
  auto cfg = config_from("grid.lambda = 0.01\ngrid.gamma = 0.01\ngrid.theta = 0.01\nseed = 3\n");
  const auto fitted = harness::fit_model("stmtmv", prep, cfg);

  const fs::path path = fs::temp_directory_path() / "stmtmv_model_roundtrip.json";
  fitted.model.save(path.string());
  const auto loaded = harness::ModelFile::load(path.string());
  fs::remove(path);

  CHECK(loaded.kind == "stmtmv");
  CHECK(loaded.Ds == fitted.model.Ds);
  CHECK(loaded.station_ids == fitted.model.station_ids);
  CHECK((loaded.W - fitted.model.W).lpNorm<Eigen::Infinity>() == 0.0);

  const Eigen::VectorXd a = fitted.model.predict(synth.dataset.full_matrix(0), 0);
  const Eigen::VectorXd b = loaded.predict(synth.dataset.full_matrix(0), 0);
  CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-15);

  CHECK_THROWS_AS(harness::ModelFile::load("/nonexistent/model.json"), ParseError);
}

TEST_CASE("config: parsing, defaults, and rejection of bad keys") {
  const auto cfg = config_from(
      "data.kind = synthetic\nhorizons = 1 2\nseed = 5\ngrid.lambda = 0 0.1\n"
      "coupling.triplet = 1 -1 0\nsynth.stations = 4\n");
  CHECK(cfg.horizons == std::vector<int>{1, 2});
  CHECK(cfg.seed.has_value());
  CHECK(cfg.grid_lambda == std::vector<double>{0.0, 0.1});
  CHECK(cfg.triplet.pow_d == 1);
  CHECK(cfg.synth.stations == 4);

  CHECK_THROWS_AS(config_from("bogus.key = 1\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(config_from("horizons = 9\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(config_from("split.train_fraction = 1.5\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(config_from("data.kind = csv\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(config_from("not a key value line\n"), ConfigError);
  CHECK_THROWS_AS(config_from("").require_seed(), ConfigError);

  // canonical text is sorted, so the hash ignores declaration order
  const auto kv1 = harness::KeyValueConfig::from_string("a = 1\nb = 2\n");
  const auto kv2 = harness::KeyValueConfig::from_string("b = 2\na = 1\n");
  CHECK(kv1.hash() == kv2.hash());
}

TEST_CASE("run_experiment: synthetic table is complete and reproducible") {
  const auto cfg = config_from(
      "data.kind = synthetic\nhorizons = 1 2\nseed = 42\n"
      "models = stmtmv ols lasso\n"
      "synth.stations = 4\nsynth.spatial_dim = 5\nsynth.temporal_dim = 7\n"
      "synth.samples_per_station = 50\nsynth.support = 4\n"
      "grid.lambda = 0 0.1\ngrid.gamma = 0 0.1\ngrid.theta = 0 0.1\ngrid.alpha = 0.01 0.1\n");
  const auto table = harness::run_experiment(cfg);

  // configured rows plus the reserved external-baseline rows
  REQUIRE(table.rows.size() == 3 + 4);
  for (const auto& model : {"stmtmv", "ols", "lasso"}) {
    const auto* cell = table.find(model, 1);
    REQUIRE(cell != nullptr);
    CHECK(cell->ok);
    CHECK(cell->rmse >= 0.0);
    CHECK(cell->acc <= 1.0);
  }
  for (const auto& model : {"arma", "kalman", "ann", "regmvmt"}) {
    const auto* cell = table.find(model, 1);
    REQUIRE(cell != nullptr);
    CHECK_FALSE(cell->ok);
  }

  const auto again = harness::run_experiment(cfg);
  CHECK(table.to_csv() == again.to_csv());
  CHECK(table.to_long_csv() == again.to_long_csv());
  CHECK(table.to_csv().find("n/a") != std::string::npos);
  CHECK(table.to_csv().find("seed=42") != std::string::npos);

  // the best-RMSE model's accuracy ranks in the top two
  std::vector<std::pair<double, std::string>> by_rmse, by_acc;
  for (const auto& model : {"stmtmv", "ols", "lasso"}) {
    const auto* cell = table.find(model, 1);
    by_rmse.push_back({cell->rmse, model});
    by_acc.push_back({-cell->acc, model});
  }
  std::sort(by_rmse.begin(), by_rmse.end());
  std::sort(by_acc.begin(), by_acc.end());
  const std::string winner = by_rmse.front().second;
  CHECK((by_acc[0].second == winner || by_acc[1].second == winner));
}

TEST_CASE("run_experiment: degenerate single station matches single-task fits") {
  const auto cfg = config_from(
      "data.kind = synthetic\nhorizons = 1\nseed = 17\n"
      "models = stmtmv ols\n"
      "synth.stations = 1\nsynth.spatial_dim = 4\nsynth.temporal_dim = 6\n"
      "synth.samples_per_station = 80\nsynth.support = 6\nsynth.noise = 0.05\n"
      "grid.lambda = 0\ngrid.gamma = 0\ngrid.theta = 0\n");
  const auto table = harness::run_experiment(cfg);
  const auto* st = table.find("stmtmv", 1);
  const auto* ols = table.find("ols", 1);
  REQUIRE((st && ols));
  REQUIRE((st->ok && ols->ok));
  CHECK(std::abs(st->rmse - ols->rmse) <= 0.05 * std::max(st->rmse, ols->rmse));
}

TEST_CASE("run_experiment: csv fixture end to end with the decay baseline") {
  Fixture fx("stmtmv_fixture_run");
  const auto cfg = config_from(
      "data.kind = csv\ndata.dir = " + fx.dir.string() +
      "\nhorizons = 1\nseed = 9\nmodels = decay ols stmtmv\n"
      "grid.lambda = 0 0.01\ngrid.gamma = 0 0.01\ngrid.theta = 0 0.01\n");
  const auto table = harness::run_experiment(cfg);
  for (const auto& model : {"decay", "ols", "stmtmv"}) {
    const auto* cell = table.find(model, 1);
    REQUIRE(cell != nullptr);
    CHECK(cell->ok);
    CHECK(std::isfinite(cell->rmse));
  }
  CHECK(table.find("decay", 1)->rmse > 0.0);
}

TEST_CASE("run_experiment: unknown model rejected") {
  const auto cfg = config_from("models = stmtmv nonsense\nseed = 4\n");
  CHECK_THROWS_AS(harness::run_experiment(cfg), ConfigError);
}
