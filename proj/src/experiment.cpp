#include "stmtmv/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

#include "stmtmv/baselines.hpp"
#include "stmtmv/errors.hpp"
#include "stmtmv/metrics.hpp"

namespace stmtmv::harness {

namespace {

const std::set<std::string> kStmtmvModels = {"stmtmv", "stmtmv-us", "stmtmv-ws", "stmtmv-sv"};
const std::set<std::string> kBaselineModels = {"decay", "ols", "lasso", "mrmtl"};
const std::vector<std::string> kReservedModels = {"arma", "kalman", "ann", "regmvmt"};

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

solver::StationDataset slice_rows(const solver::StationDataset& d,
                                  const std::vector<std::pair<int, int>>& ranges) {
  solver::StationDataset out;
  out.Ds = d.Ds;
  out.Dt = d.Dt;
  out.ids = d.ids;
  for (int l = 0; l < d.tasks(); ++l) {
    const auto [begin, end] = ranges[l];
    out.Xs.push_back(d.Xs[l].middleRows(begin, end - begin));
    out.Xt.push_back(d.Xt[l].middleRows(begin, end - begin));
    out.y.push_back(d.y[l].segment(begin, end - begin));
  }
  return out;
}

}  // namespace

std::uint64_t horizon_seed(std::uint64_t seed, int horizon) {
  return seed + 7919ull * static_cast<std::uint64_t>(horizon);
}

PreparedData prepare_split(const solver::StationDataset& raw,
                           const pipes::TaskCoupling& coupling,
                           const std::vector<std::vector<std::vector<double>>>& rc_windows,
                           double train_fraction, double validation_fraction) {
  raw.validate();
  const int M = raw.tasks();
  std::vector<std::pair<int, int>> train_r(M), core_r(M), val_r(M), test_r(M);
  for (int l = 0; l < M; ++l) {
    const int n = static_cast<int>(raw.y[l].size());
    if (n < 2) {
      throw InvalidInput("prepare_split: station '" + raw.ids[l] + "' has fewer than 2 samples");
    }
    int n_train = static_cast<int>(std::floor(train_fraction * n));
    n_train = std::clamp(n_train, 1, n - 1);
    int n_val = static_cast<int>(std::floor(validation_fraction * n_train));
    n_val = std::clamp(n_val, n_train > 1 ? 1 : 0, n_train - 1);
    train_r[l] = {0, n_train};
    core_r[l] = {0, n_train - n_val};
    val_r[l] = n_val > 0 ? std::pair{n_train - n_val, n_train} : std::pair{0, n_train};
    test_r[l] = {n_train, n};
  }

  PreparedData prep;
  prep.coupling = coupling;
  solver::StationDataset train_raw = slice_rows(raw, train_r);
  prep.stats = StandardizeStats::fit(train_raw);
  prep.y_offset.resize(M);
  for (int l = 0; l < M; ++l) prep.y_offset(l) = train_raw.y[l].mean();
  const solver::StationDataset std_all = prep.stats.apply(raw);
  prep.train = slice_rows(std_all, train_r);
  prep.train_core = slice_rows(std_all, core_r);
  prep.val = slice_rows(std_all, val_r);
  prep.test = slice_rows(std_all, test_r);

  if (!rc_windows.empty()) {
    prep.test_rc_windows.resize(M);
    for (int l = 0; l < M; ++l) {
      prep.test_rc_windows[l].assign(rc_windows[l].begin() + test_r[l].first,
                                     rc_windows[l].begin() + test_r[l].second);
    }
  }
  return prep;
}

solver::StationDataset PreparedData::centered(const solver::StationDataset& part) const {
  solver::StationDataset out = part;
  for (int l = 0; l < part.tasks(); ++l) out.y[l].array() -= y_offset(l);
  return out;
}

namespace {

double pooled_rmse(const std::vector<Eigen::VectorXd>& truth,
                   const std::vector<Eigen::VectorXd>& pred) {
  return metrics::rmse(truth, pred);
}

std::vector<Eigen::VectorXd> predict_dataset(const Eigen::MatrixXd& W, bool late_fusion,
                                             const solver::StationDataset& data) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(data.tasks());
  for (int l = 0; l < data.tasks(); ++l) {
    const Eigen::MatrixXd X = data.full_matrix(l);
    out.push_back(late_fusion ? solver::predict(X, W.col(l))
                              : baselines::baseline_predict(X, W.col(l)));
  }
  return out;
}

ModelFile wrap_model(const std::string& kind, const PreparedData& prep, Eigen::MatrixXd W) {
  ModelFile m;
  m.kind = kind;
  m.Ds = prep.train.Ds;
  m.Dt = prep.train.Dt;
  m.station_ids = prep.train.ids;
  m.W = std::move(W);
  m.standardize = prep.stats;
  m.y_offset = prep.y_offset;
  return m;
}

FittedModel fit_stmtmv(const std::string& name, const PreparedData& prep,
                       const ExperimentConfig& cfg) {
  solver::Variant variant = solver::Variant::full;
  if (name == "stmtmv-us") variant = solver::Variant::us;
  if (name == "stmtmv-ws") variant = solver::Variant::ws;
  if (name == "stmtmv-sv") variant = solver::Variant::sv;

  const std::vector<double> zero = {0.0};
  const auto& lambdas = variant == solver::Variant::sv ? zero : cfg.grid_lambda;
  const auto& thetas = variant == solver::Variant::ws ? zero : cfg.grid_theta;

  const solver::StationDataset core = prep.centered(prep.train_core);
  const solver::StationDataset val = prep.centered(prep.val);

  solver::SolverParams best = cfg.solver;
  best.variant = variant;
  double best_rmse = std::numeric_limits<double>::infinity();
  for (double lambda : lambdas) {
    for (double gamma : cfg.grid_gamma) {
      for (double theta : thetas) {
        solver::SolverParams p = cfg.solver;
        p.variant = variant;
        p.lambda = lambda;
        p.gamma = gamma;
        p.theta = theta;
        const auto report = solver::fista_fit(core, prep.coupling, p);
        const auto val_pred = predict_dataset(report.weights.W, true, val);
        const double r = pooled_rmse(val.y, val_pred);
        if (r < best_rmse) {
          best_rmse = r;
          best = p;
        }
      }
    }
  }

  const auto final_report = solver::fista_fit(prep.centered(prep.train), prep.coupling, best);
  FittedModel fm;
  fm.val_rmse = best_rmse;
  fm.model = wrap_model(name, prep, final_report.weights.W);
  fm.model.lambda = best.lambda;
  fm.model.gamma = best.gamma;
  fm.model.theta = best.theta;
  return fm;
}

FittedModel fit_lasso(const PreparedData& prep, const ExperimentConfig& cfg) {
  const solver::StationDataset core = prep.centered(prep.train_core);
  const solver::StationDataset val = prep.centered(prep.val);
  double best_alpha = cfg.grid_alpha.front();
  double best_rmse = std::numeric_limits<double>::infinity();
  for (double alpha : cfg.grid_alpha) {
    const auto model = baselines::lasso_fit(core, alpha);
    const double r = pooled_rmse(val.y, predict_dataset(model.W, false, val));
    if (r < best_rmse) {
      best_rmse = r;
      best_alpha = alpha;
    }
  }
  FittedModel fm;
  fm.val_rmse = best_rmse;
  fm.model =
      wrap_model("lasso", prep, baselines::lasso_fit(prep.centered(prep.train), best_alpha).W);
  fm.model.alpha = best_alpha;
  return fm;
}

FittedModel fit_mrmtl(const PreparedData& prep, const ExperimentConfig& cfg) {
  const solver::StationDataset core = prep.centered(prep.train_core);
  const solver::StationDataset val = prep.centered(prep.val);
  double best_lambda = cfg.grid_mr_lambda.front();
  double best_theta = cfg.grid_mr_theta.front();
  double best_rmse = std::numeric_limits<double>::infinity();
  for (double lambda : cfg.grid_mr_lambda) {
    for (double theta : cfg.grid_mr_theta) {
      const auto model = baselines::mrmtl_fit(core, lambda, theta);
      const double r = pooled_rmse(val.y, predict_dataset(model.W, false, val));
      if (r < best_rmse) {
        best_rmse = r;
        best_lambda = lambda;
        best_theta = theta;
      }
    }
  }
  FittedModel fm;
  fm.val_rmse = best_rmse;
  fm.model = wrap_model(
      "mrmtl", prep, baselines::mrmtl_fit(prep.centered(prep.train), best_lambda, best_theta).W);
  fm.model.lambda = best_lambda;
  fm.model.theta = best_theta;
  return fm;
}

}  // namespace

FittedModel fit_model(const std::string& name, const PreparedData& prep,
                      const ExperimentConfig& cfg) {
  if (kStmtmvModels.count(name)) return fit_stmtmv(name, prep, cfg);
  if (name == "ols") {
    FittedModel fm;
    fm.model = wrap_model("ols", prep, baselines::ols_fit(prep.centered(prep.train)).W);
    return fm;
  }
  if (name == "lasso") return fit_lasso(prep, cfg);
  if (name == "mrmtl") return fit_mrmtl(prep, cfg);
  throw ConfigError("unknown model '" + name + "'");
}

std::vector<Eigen::VectorXd> predict_test(const ModelFile& model, const PreparedData& prep) {
  auto pred = predict_dataset(model.W, model.uses_late_fusion(), prep.test);
  for (int l = 0; l < prep.test.tasks(); ++l) pred[l].array() += prep.y_offset(l);
  return pred;
}

namespace {

// The decay baseline works on raw RC windows, one local fit per test sample.
// Windows the log-linear fit rejects fall back to persistence.
ResultCell eval_decay(const PreparedData& prep, int horizon) {
  ResultCell cell;
  if (prep.test_rc_windows.empty()) {
    cell.note = "requires raw series data";
    return cell;
  }
  std::vector<Eigen::VectorXd> pred(prep.test.tasks());
  for (int l = 0; l < prep.test.tasks(); ++l) {
    const auto& windows = prep.test_rc_windows[l];
    Eigen::VectorXd p(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
      features::TimeSeriesWindow w;
      w.values = windows[i];
      w.step_minutes = 60.0;  // decay fits in hours; the grid step cancels in k*h
      try {
        p(i) = baselines::decay_forecast(w, horizon);
      } catch (const InvalidInput&) {
        p(i) = windows[i].back();
      }
    }
    pred[l] = std::move(p);
  }
  cell.rmse = metrics::rmse(prep.test.y, pred);
  cell.acc = metrics::accuracy(prep.test.y, pred);
  cell.ok = true;
  return cell;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, cfg.require_seed());
}

ResultTable run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  for (const auto& model : cfg.models) {
    if (!kStmtmvModels.count(model) && !kBaselineModels.count(model)) {
      throw ConfigError("unknown model '" + model + "' in models list");
    }
  }

  ResultTable table;
  table.horizons = cfg.horizons;
  table.seed = seed;
  table.config_hash_hex = hex64(cfg.config_hash);
  table.timestamp = now_iso8601();
  for (const auto& model : cfg.models) {
    table.rows.push_back({model, std::vector<ResultCell>(cfg.horizons.size())});
  }
  for (const auto& model : kReservedModels) {
    ResultRow row{model, std::vector<ResultCell>(cfg.horizons.size())};
    for (auto& cell : row.cells) cell.note = "external baseline, not implemented";
    table.rows.push_back(std::move(row));
  }

  for (std::size_t hi = 0; hi < cfg.horizons.size(); ++hi) {
    const int horizon = cfg.horizons[hi];

    PreparedData prep;
    if (cfg.data_kind == "synthetic") {
      const auto synth = generate_synthetic(cfg.synth, horizon_seed(seed, horizon));
      prep = prepare_split(synth.dataset, synth.coupling, {}, cfg.train_fraction,
                           cfg.validation_fraction);
    } else {
      const auto loaded = load_dataset(cfg.data_dir, cfg, horizon);
      prep = prepare_split(loaded.data, loaded.coupling, loaded.rc_windows, cfg.train_fraction,
                           cfg.validation_fraction);
    }

    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
      const std::string& name = cfg.models[mi];
      ResultCell& cell = table.rows[mi].cells[hi];
      try {
        if (name == "decay") {
          cell = eval_decay(prep, horizon);
        } else {
          const auto fitted = fit_model(name, prep, cfg);
          const auto pred = predict_test(fitted.model, prep);
          cell.rmse = metrics::rmse(prep.test.y, pred);
          cell.acc = metrics::accuracy(prep.test.y, pred);
          cell.ok = true;
        }
      } catch (const NumericFailure& e) {
        cell.ok = false;
        cell.note = e.what();
      }
    }
  }
  return table;
}

const ResultCell* ResultTable::find(const std::string& model, int horizon) const {
  const auto hit = std::find(horizons.begin(), horizons.end(), horizon);
  if (hit == horizons.end()) return nullptr;
  const auto col = static_cast<std::size_t>(hit - horizons.begin());
  for (const auto& row : rows) {
    if (row.model == model) return &row.cells[col];
  }
  return nullptr;
}

std::string ResultTable::to_csv() const {
  std::ostringstream out;
  out << "# stmtmv-results-v1\n";
  out << "# config_hash=" << config_hash_hex << "\n";
  out << "# seed=" << seed << "\n";
  out << "model";
  for (int h : horizons) out << ",rmse_h" << h;
  for (int h : horizons) out << ",acc_h" << h;
  out << "\n";
  for (const auto& row : rows) {
    out << row.model;
    for (const auto& cell : row.cells) out << "," << (cell.ok ? format_value(cell.rmse) : "n/a");
    for (const auto& cell : row.cells) out << "," << (cell.ok ? format_value(cell.acc) : "n/a");
    out << "\n";
  }
  return out.str();
}

std::string ResultTable::to_long_csv() const {
  std::ostringstream out;
  out << "model,horizon,metric,value\n";
  for (const auto& row : rows) {
    for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
      if (!row.cells[hi].ok) continue;
      out << row.model << "," << horizons[hi] << ",rmse," << format_value(row.cells[hi].rmse)
          << "\n";
      out << row.model << "," << horizons[hi] << ",acc," << format_value(row.cells[hi].acc)
          << "\n";
    }
  }
  return out.str();
}

std::string ResultTable::to_text() const {
  std::size_t width = 8;
  for (const auto& row : rows) width = std::max(width, row.model.size());

  std::ostringstream out;
  out << "run " << timestamp << "  seed=" << seed << "  config=" << config_hash_hex << "\n\n";
  auto emit_block = [&](const char* title, bool want_rmse) {
    out << title << "\n";
    out << std::string(width, ' ');
    for (int h : horizons) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%13s",
                    (std::string(want_rmse ? "rmse_h" : "acc_h") + std::to_string(h)).c_str());
      out << buf;
    }
    out << "\n";
    for (const auto& row : rows) {
      out << row.model << std::string(width - row.model.size(), ' ');
      for (const auto& cell : row.cells) {
        char buf[16];
        if (cell.ok) {
          std::snprintf(buf, sizeof(buf), "%13.4e", want_rmse ? cell.rmse : cell.acc);
        } else {
          std::snprintf(buf, sizeof(buf), "%13s", "n/a");
        }
        out << buf;
      }
      out << "\n";
    }
    out << "\n";
  };
  emit_block("RMSE", true);
  emit_block("Accuracy", false);
  return out.str();
}

}  // namespace stmtmv::harness
