#pragma once

#include <Eigen/Dense>
#include <vector>

namespace stmtmv::metrics {

// Pooled root-mean-square error over all stations, sqrt(sum of squared
// residuals / total sample count).
double rmse(const std::vector<Eigen::VectorXd>& y,
            const std::vector<Eigen::VectorXd>& yhat);

// Acc = 1 - (1/M) sum_l ||y_l - yhat_l||_1 / ||y_l||_1. May be negative;
// a zero-norm target is rejected.
double accuracy(const std::vector<Eigen::VectorXd>& y,
                const std::vector<Eigen::VectorXd>& yhat);

}  // namespace stmtmv::metrics
