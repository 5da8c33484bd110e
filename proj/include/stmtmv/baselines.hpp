#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stmtmv/features.hpp"
#include "stmtmv/solver.hpp"

namespace stmtmv::baselines {

// First-order decay dC/dt = -kC fitted in the log domain.
struct DecayModel {
  double k = 0.0;   // 1/hour, clamped at 0
  double c0 = 0.0;  // mg/L
};

enum class BaselineKind { decay, ols, lasso, mrmtl };

std::string kind_name(BaselineKind kind);

// Per-task linear models sharing the plain y ~ X w convention (no late
// fusion); regularizer values are kept for reporting.
struct BaselineModel {
  BaselineKind kind = BaselineKind::ols;
  Eigen::MatrixXd W;  // D x M
  double alpha = 0.0;
  double lambda = 0.0;
  double theta = 0.0;
};

// Least-squares line on (hours, ln c): k = -slope clamped at 0,
// c0 = exp(intercept). Requires >= 2 strictly positive samples.
DecayModel decay_fit(const features::TimeSeriesWindow& series);

// c0 * exp(-k * h).
double decay_predict(const DecayModel& m, double horizon_hours);

// Fits on the window, then re-anchors c0 at the final observation before
// extrapolating `horizon_hours` ahead.
double decay_forecast(const features::TimeSeriesWindow& series, double horizon_hours);

// Per-task minimizer of ||y_l - X_l w_l||^2 with ridge jitter 1e-8.
BaselineModel ols_fit(const solver::StationDataset& data);

// 0.5 sum_l ||y_l - X_l w_l||^2 + alpha ||W||_1, solved by the shared FISTA
// engine with an elementwise soft threshold.
BaselineModel lasso_fit(const solver::StationDataset& data, double alpha);

// Mean-regularized multi-task learning,
//   0.5 sum_l ||y_l - X_l w_l||^2 + lambda sum_l ||w_l - mean(w)||^2 + theta ||W||_F^2,
// minimized by backtracking gradient descent to relative tolerance 1e-8.
BaselineModel mrmtl_fit(const solver::StationDataset& data, double lambda, double theta);

// Plain linear prediction used by every regression baseline.
Eigen::VectorXd baseline_predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& w);

}  // namespace stmtmv::baselines
