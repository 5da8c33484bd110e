#include "stmtmv/metrics.hpp"

#include <cmath>

#include "stmtmv/errors.hpp"

namespace stmtmv::metrics {

namespace {

void check_shapes(const std::vector<Eigen::VectorXd>& y,
                  const std::vector<Eigen::VectorXd>& yhat, const char* op) {
  if (y.empty() || y.size() != yhat.size()) {
    throw InvalidInput(std::string(op) + ": station counts differ or are empty");
  }
  for (std::size_t l = 0; l < y.size(); ++l) {
    if (y[l].size() != yhat[l].size() || y[l].size() == 0) {
      throw InvalidInput(std::string(op) + ": station " + std::to_string(l) +
                         " has mismatched or empty vectors");
    }
  }
}

}  // namespace

double rmse(const std::vector<Eigen::VectorXd>& y, const std::vector<Eigen::VectorXd>& yhat) {
  check_shapes(y, yhat, "rmse");
  double ss = 0.0;
  long n = 0;
  for (std::size_t l = 0; l < y.size(); ++l) {
    ss += (y[l] - yhat[l]).squaredNorm();
    n += y[l].size();
  }
  return std::sqrt(ss / static_cast<double>(n));
}

double accuracy(const std::vector<Eigen::VectorXd>& y, const std::vector<Eigen::VectorXd>& yhat) {
  check_shapes(y, yhat, "accuracy");
  double acc = 0.0;
  for (std::size_t l = 0; l < y.size(); ++l) {
    const double denom = y[l].cwiseAbs().sum();
    if (denom == 0.0) {
      throw InvalidInput("accuracy: station " + std::to_string(l) + " has a zero-norm target");
    }
    acc += (y[l] - yhat[l]).cwiseAbs().sum() / denom;
  }
  return 1.0 - acc / static_cast<double>(y.size());
}

}  // namespace stmtmv::metrics
