#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stmtmv/solver.hpp"

namespace stmtmv::harness {

// Per-column z-scoring statistics computed on the training split. Columns
// with zero spread keep scale 1 so standardization stays invertible.
struct StandardizeStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static StandardizeStats fit(const solver::StationDataset& data);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
  solver::StationDataset apply(const solver::StationDataset& data) const;
};

// Versioned on-disk model container shared by the stMTMV solver and the
// regression baselines. Holds the weight matrix, the view split, the
// standardization statistics and the regularizers used.
struct ModelFile {
  int version = 1;
  std::string kind = "stmtmv";  // stmtmv[-us|-ws|-sv] | ols | lasso | mrmtl
  int Ds = 0;
  int Dt = 0;
  std::vector<std::string> station_ids;
  Eigen::MatrixXd W;  // D x M
  StandardizeStats standardize;
  Eigen::VectorXd y_offset;  // per-station training target mean, re-added at prediction
  double lambda = 0.0;
  double gamma = 0.0;
  double theta = 0.0;
  double alpha = 0.0;

  bool uses_late_fusion() const { return kind.rfind("stmtmv", 0) == 0; }

  // Standardizes raw features and predicts for station column `l`.
  Eigen::VectorXd predict(const Eigen::MatrixXd& X_raw, int l) const;

  void save(const std::string& path) const;
  static ModelFile load(const std::string& path);
};

}  // namespace stmtmv::harness
