// Command-line front end: synthetic data generation, feature layout
// inspection, pipe-graph correlation tools, model fitting/prediction and the
// full experiment runner.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "stmtmv/baselines.hpp"
#include "stmtmv/config.hpp"
#include "stmtmv/dataset_io.hpp"
#include "stmtmv/errors.hpp"
#include "stmtmv/experiment.hpp"
#include "stmtmv/metrics.hpp"
#include "stmtmv/model_io.hpp"
#include "stmtmv/synthetic.hpp"

namespace fs = std::filesystem;
using namespace stmtmv;

namespace {

harness::ExperimentConfig load_config(const std::string& path,
                                      const std::optional<std::uint64_t>& seed_flag) {
  harness::ExperimentConfig cfg = path.empty()
                                      ? harness::ExperimentConfig::from_kv(
                                            harness::KeyValueConfig::from_string("", "<default>"))
                                      : harness::ExperimentConfig::from_file(path);
  if (seed_flag) cfg.seed = *seed_flag;
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << content;
}

std::string matrix_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& ids) {
  std::ostringstream out;
  out << "station";
  for (const auto& id : ids) out << "," << id;
  out << "\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << ids[i];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << "," << m(i, j);
    out << "\n";
  }
  return out.str();
}

Eigen::MatrixXd read_matrix_csv(const std::string& path, const std::vector<std::string>& ids) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  Eigen::MatrixXd m(ids.size(), ids.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= ids.size()) throw ParseError(path + ": more rows than stations");
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    if (tok != ids[row]) {
      throw ParseError(path + ": expected row for station '" + ids[row] + "', found '" + tok + "'");
    }
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (!std::getline(ss, tok, ',')) throw ParseError(path + ": short row for '" + ids[row] + "'");
      try {
        m(row, j) = std::stod(tok);
      } catch (const std::exception&) {
        throw ParseError(path + ": cannot parse '" + tok + "' as a number");
      }
    }
    ++row;
  }
  if (row != ids.size()) throw ParseError(path + ": not enough rows");
  return m;
}

// Loads the dataset a config describes for one horizon; synthetic configs
// regenerate deterministically from the seed.
struct DataBundle {
  solver::StationDataset data;
  pipes::TaskCoupling coupling;
  std::vector<std::vector<std::vector<double>>> rc_windows;
};

DataBundle load_bundle(const harness::ExperimentConfig& cfg, int horizon) {
  DataBundle b;
  if (cfg.data_kind == "synthetic") {
    auto synth = harness::generate_synthetic(cfg.synth,
                                             harness::horizon_seed(cfg.require_seed(), horizon));
    b.data = std::move(synth.dataset);
    b.coupling = std::move(synth.coupling);
  } else {
    auto loaded = harness::load_dataset(cfg.data_dir, cfg, horizon);
    b.data = std::move(loaded.data);
    b.coupling = std::move(loaded.coupling);
    b.rc_windows = std::move(loaded.rc_windows);
    std::cerr << "loaded " << b.data.tasks() << " stations (skipped: " << loaded.skipped_warmup
              << " warmup, " << loaded.skipped_missing << " gap, " << loaded.skipped_target
              << " target)\n";
  }
  return b;
}

int split_point(double train_fraction, int n) {
  return std::clamp(static_cast<int>(std::floor(train_fraction * n)), 1, n - 1);
}

int cmd_synth(const harness::ExperimentConfig& cfg, const std::string& out_dir) {
  const auto seed = cfg.require_seed();
  const auto synth = harness::generate_synthetic(cfg.synth, seed);
  fs::create_directories(out_dir);

  std::ostringstream pipes_csv;
  pipes_csv << "node_a,node_b,length_km,diameter_mm,age_years\n" << std::setprecision(17);
  for (const auto& s : synth.network.segments()) {
    pipes_csv << s.node_a << "," << s.node_b << "," << s.length_km << "," << s.diameter_mm << ","
              << s.age_years << "\n";
  }
  write_file(fs::path(out_dir) / "pipes.csv", pipes_csv.str());

  std::ostringstream stations_csv;
  stations_csv << "station_id,node_id\n";
  for (const auto& [id, node] : synth.network.stations()) stations_csv << id << "," << node << "\n";
  write_file(fs::path(out_dir) / "stations.csv", stations_csv.str());

  const auto& ids = synth.dataset.ids;
  write_file(fs::path(out_dir) / "coupling_C.csv", matrix_csv(synth.coupling.C, ids));
  write_file(fs::path(out_dir) / "coupling_L.csv", matrix_csv(synth.coupling.L, ids));

  for (int l = 0; l < synth.dataset.tasks(); ++l) {
    std::ostringstream station_csv;
    station_csv << "y";
    for (int j = 0; j < synth.dataset.Ds; ++j) station_csv << ",xs_" << j;
    for (int j = 0; j < synth.dataset.Dt; ++j) station_csv << ",xt_" << j;
    station_csv << "\n" << std::setprecision(17);
    for (int i = 0; i < synth.dataset.y[l].size(); ++i) {
      station_csv << synth.dataset.y[l](i);
      for (int j = 0; j < synth.dataset.Ds; ++j) station_csv << "," << synth.dataset.Xs[l](i, j);
      for (int j = 0; j < synth.dataset.Dt; ++j) station_csv << "," << synth.dataset.Xt[l](i, j);
      station_csv << "\n";
    }
    write_file(fs::path(out_dir) / ("station_" + ids[l] + ".csv"), station_csv.str());
  }

  std::ostringstream planted;
  planted << "row";
  for (const auto& id : ids) planted << "," << id;
  planted << "\n" << std::setprecision(17);
  for (Eigen::Index r = 0; r < synth.planted.W.rows(); ++r) {
    planted << r;
    for (Eigen::Index c = 0; c < synth.planted.W.cols(); ++c) planted << "," << synth.planted.W(r, c);
    planted << "\n";
  }
  write_file(fs::path(out_dir) / "planted_weights.csv", planted.str());

  std::cout << "wrote synthetic dataset (" << synth.dataset.tasks() << " stations, D="
            << synth.dataset.dim() << ", N_l=" << synth.dataset.y[0].size() << ") to " << out_dir
            << "\n";
  return 0;
}

int cmd_features_describe(const harness::ExperimentConfig& cfg, const std::string& out_path) {
  std::ostringstream out;
  out << "name,index\n";
  int idx = 0;
  for (const auto& name : features::spatial_layout(cfg.features)) out << name << "," << idx++ << "\n";
  for (const auto& name : features::temporal_layout(cfg.features)) out << name << "," << idx++ << "\n";
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    write_file(out_path, out.str());
  }
  return 0;
}

int cmd_correlate(const std::string& pipes_path, const std::string& stations_path, int k,
                  const std::vector<int>& triplet, bool normalize, const std::string& out_dir) {
  auto g = pipes::read_pipe_network_csv(pipes_path);
  pipes::read_station_map_csv(stations_path, g);
  const auto ids = g.station_ids();
  const pipes::PowerTriplet t{triplet[0], triplet[1], triplet[2]};
  const auto coupling = pipes::correlation_matrix(g, ids, k, t, normalize);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "C.csv", matrix_csv(coupling.C, ids));
  write_file(fs::path(out_dir) / "L.csv", matrix_csv(coupling.L, ids));
  std::cout << "wrote " << ids.size() << "x" << ids.size() << " coupling (k=" << k << ", triplet <"
            << t.pow_d << "," << t.pow_len << "," << t.pow_age << ">) to " << out_dir << "\n";
  return 0;
}

int cmd_scan_powers(const std::string& pipes_path, const std::string& stations_path,
                    const std::string& corr_path, int k, int top, const std::string& out_path) {
  auto g = pipes::read_pipe_network_csv(pipes_path);
  pipes::read_station_map_csv(stations_path, g);
  const auto ids = g.station_ids();
  const Eigen::MatrixXd corr = read_matrix_csv(corr_path, ids);
  const auto ranked = pipes::power_triplet_scan(g, ids, corr, k);

  std::ostringstream out;
  out << "pow_d,pow_len,pow_age,correlation\n" << std::setprecision(17);
  const int limit =
      top > 0 ? std::min(top, static_cast<int>(ranked.size())) : static_cast<int>(ranked.size());
  for (int i = 0; i < limit; ++i) {
    out << ranked[i].triplet.pow_d << "," << ranked[i].triplet.pow_len << ","
        << ranked[i].triplet.pow_age << "," << ranked[i].score << "\n";
  }
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    write_file(out_path, out.str());
    std::cout << "wrote " << limit << " ranked triplets to " << out_path << "\n";
  }
  return 0;
}

int cmd_fit(const harness::ExperimentConfig& cfg, const std::string& model_name, int horizon,
            const std::string& out_path) {
  if (model_name == "decay") {
    throw ConfigError("the decay baseline is fit per window at prediction time; use `run`");
  }
  const auto bundle = load_bundle(cfg, horizon);
  const auto prep = harness::prepare_split(bundle.data, bundle.coupling, bundle.rc_windows,
                                           cfg.train_fraction, cfg.validation_fraction);
  const auto fitted = harness::fit_model(model_name, prep, cfg);
  fitted.model.save(out_path);
  std::cout << "fit " << model_name << " (horizon " << horizon << "h) -> " << out_path << "\n";
  return 0;
}

int cmd_predict(const harness::ExperimentConfig& cfg, const std::string& model_path, int horizon,
                const std::string& out_path) {
  const auto model = harness::ModelFile::load(model_path);
  const auto bundle = load_bundle(cfg, horizon);
  if (model.station_ids != bundle.data.ids) {
    throw InvalidInput("model stations do not match the dataset");
  }

  std::ostringstream out;
  out << "station,sample,split,y_true,y_pred\n" << std::setprecision(17);
  for (int l = 0; l < bundle.data.tasks(); ++l) {
    const Eigen::MatrixXd X = bundle.data.full_matrix(l);
    const Eigen::VectorXd pred = model.predict(X, l);
    const int n = static_cast<int>(pred.size());
    const int n_train = split_point(cfg.train_fraction, n);
    for (int i = 0; i < n; ++i) {
      out << bundle.data.ids[l] << "," << i << "," << (i < n_train ? "train" : "test") << ","
          << bundle.data.y[l](i) << "," << pred(i) << "\n";
    }
  }
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    write_file(out_path, out.str());
    std::cout << "wrote predictions to " << out_path << "\n";
  }
  return 0;
}

int cmd_eval(const harness::ExperimentConfig& cfg, const std::string& model_path, int horizon) {
  const auto model = harness::ModelFile::load(model_path);
  const auto bundle = load_bundle(cfg, horizon);
  if (model.station_ids != bundle.data.ids) {
    throw InvalidInput("model stations do not match the dataset");
  }
  std::vector<Eigen::VectorXd> truth, pred;
  for (int l = 0; l < bundle.data.tasks(); ++l) {
    const Eigen::MatrixXd X = bundle.data.full_matrix(l);
    const Eigen::VectorXd p = model.predict(X, l);
    const int n = static_cast<int>(p.size());
    const int n_train = split_point(cfg.train_fraction, n);
    truth.push_back(bundle.data.y[l].tail(n - n_train));
    pred.push_back(p.tail(n - n_train));
  }
  std::cout << "model=" << model.kind << " horizon=" << horizon << "h\n";
  std::cout << "test_rmse=" << metrics::rmse(truth, pred) << "\n";
  std::cout << "test_acc=" << metrics::accuracy(truth, pred) << "\n";
  return 0;
}

int cmd_run(const harness::ExperimentConfig& cfg, const std::string& out_dir) {
  const auto table = harness::run_experiment(cfg);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "results.csv", table.to_csv());
  write_file(fs::path(out_dir) / "results_long.csv", table.to_long_csv());
  write_file(fs::path(out_dir) / "results.txt", table.to_text());
  std::cout << table.to_text();
  std::cout << "wrote results to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatio-temporal multi-task multi-view water quality prediction"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", out_path, model_name = "stmtmv", model_path;
  std::string pipes_path, stations_path, corr_path;
  std::optional<std::uint64_t> seed_flag;
  int horizon = 1, k = 3, top = 0;
  std::vector<int> triplet = {2, -1, -1};
  bool describe = false, normalize = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key/value config file");
    sub->add_option("--seed", seed_flag, "random seed (overrides the config)");
  };

  auto* synth = app.add_subcommand("synth", "generate a planted synthetic dataset");
  add_common(synth);
  synth->add_option("--out-dir", out_dir, "output directory");

  auto* feats = app.add_subcommand("features", "feature utilities");
  add_common(feats);
  feats->add_flag("--describe", describe, "dump the feature layout as name,index CSV");
  feats->add_option("--out", out_path, "write to file instead of stdout");

  auto* corr = app.add_subcommand("correlate", "emit the station coupling C and Laplacian L");
  corr->add_option("--pipes", pipes_path, "pipe segment CSV")->required();
  corr->add_option("--stations", stations_path, "station map CSV")->required();
  corr->add_option("--k", k, "number of shortest paths");
  corr->add_option("--triplet", triplet, "power triplet pow_d pow_len pow_age")->expected(3);
  corr->add_flag("--normalize", normalize, "scale C by 1/max entry");
  corr->add_option("--out-dir", out_dir, "output directory");

  auto* scan = app.add_subcommand("scan-powers", "rank power triplets against an empirical matrix");
  scan->add_option("--pipes", pipes_path, "pipe segment CSV")->required();
  scan->add_option("--stations", stations_path, "station map CSV")->required();
  scan->add_option("--corr", corr_path, "empirical Pearson matrix CSV")->required();
  scan->add_option("--k", k, "number of shortest paths");
  scan->add_option("--top", top, "emit only the best N triplets");
  scan->add_option("--out", out_path, "write to file instead of stdout");

  auto* fit = app.add_subcommand("fit", "fit one model and write a model file");
  add_common(fit);
  fit->add_option("--model", model_name, "stmtmv[-us|-ws|-sv] | ols | lasso | mrmtl");
  fit->add_option("--horizon", horizon, "prediction horizon in hours");
  fit->add_option("--out", out_path, "model file path")->required();

  auto* pred = app.add_subcommand("predict", "predict with a stored model");
  add_common(pred);
  pred->add_option("--model", model_path, "model file")->required();
  pred->add_option("--horizon", horizon, "prediction horizon in hours");
  pred->add_option("--out", out_path, "predictions CSV (stdout when omitted)");

  auto* eval = app.add_subcommand("eval", "evaluate a stored model on the test split");
  add_common(eval);
  eval->add_option("--model", model_path, "model file")->required();
  eval->add_option("--horizon", horizon, "prediction horizon in hours");

  auto* run = app.add_subcommand("run", "run the full experiment table");
  add_common(run);
  run->add_option("--out-dir", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(load_config(config_path, seed_flag), out_dir);
    if (feats->parsed()) {
      if (!describe) throw ConfigError("features: nothing to do (pass --describe)");
      return cmd_features_describe(load_config(config_path, seed_flag), out_path);
    }
    if (corr->parsed()) {
      return cmd_correlate(pipes_path, stations_path, k, triplet, normalize, out_dir);
    }
    if (scan->parsed()) return cmd_scan_powers(pipes_path, stations_path, corr_path, k, top, out_path);
    if (fit->parsed()) return cmd_fit(load_config(config_path, seed_flag), model_name, horizon, out_path);
    if (pred->parsed()) return cmd_predict(load_config(config_path, seed_flag), model_path, horizon, out_path);
    if (eval->parsed()) return cmd_eval(load_config(config_path, seed_flag), model_path, horizon);
    if (run->parsed()) return cmd_run(load_config(config_path, seed_flag), out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const InvalidInput& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
