#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "stmtmv/config.hpp"
#include "stmtmv/dataset_io.hpp"
#include "stmtmv/model_io.hpp"
#include "stmtmv/synthetic.hpp"

namespace stmtmv::harness {

struct ResultCell {
  bool ok = false;
  double rmse = std::numeric_limits<double>::quiet_NaN();
  double acc = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct ResultRow {
  std::string model;
  std::vector<ResultCell> cells;  // aligned with ResultTable::horizons
};

struct ResultTable {
  std::vector<int> horizons;
  std::vector<ResultRow> rows;
  std::string config_hash_hex;
  std::uint64_t seed = 0;
  std::string timestamp;  // reporting only; never enters the CSVs

  const ResultCell* find(const std::string& model, int horizon) const;

  std::string to_csv() const;       // wide, deterministic
  std::string to_long_csv() const;  // model,horizon,metric,value
  std::string to_text() const;      // aligned human-readable report
};

// A dataset split chronologically per station, standardized with statistics
// from the training rows. Targets stay on their original scale; fitting
// centers them with `y_offset` (per-station train means) and predictions add
// the offset back. `train_core`/`val` realize the tail-of-train validation
// slice used for grid selection.
struct PreparedData {
  solver::StationDataset train, train_core, val, test;
  StandardizeStats stats;
  Eigen::VectorXd y_offset;
  pipes::TaskCoupling coupling;
  std::vector<std::vector<std::vector<double>>> test_rc_windows;  // raw; empty when synthetic

  solver::StationDataset centered(const solver::StationDataset& part) const;
};

PreparedData prepare_split(const solver::StationDataset& raw,
                           const pipes::TaskCoupling& coupling,
                           const std::vector<std::vector<std::vector<double>>>& rc_windows,
                           double train_fraction, double validation_fraction);

// One fitted model family evaluated on the prepared split. Grid selection
// minimizes validation RMSE; the winner is refit on the full training rows.
struct FittedModel {
  ModelFile model;
  double val_rmse = std::numeric_limits<double>::quiet_NaN();
};

FittedModel fit_model(const std::string& name, const PreparedData& prep,
                      const ExperimentConfig& cfg);

// Test-split predictions for a fitted container (standardization already
// baked into the PreparedData matrices, so this uses the weights directly).
std::vector<Eigen::VectorXd> predict_test(const ModelFile& model, const PreparedData& prep);

// Runs every configured model over every horizon, filling reserved rows for
// the external baselines the harness intentionally does not implement.
// A numeric failure is recorded in its cell and the run continues.
ResultTable run_experiment(const ExperimentConfig& cfg);

// As above but with an explicit seed (CLI --seed override).
ResultTable run_experiment(const ExperimentConfig& cfg, std::uint64_t seed);

std::uint64_t horizon_seed(std::uint64_t seed, int horizon);

}  // namespace stmtmv::harness
