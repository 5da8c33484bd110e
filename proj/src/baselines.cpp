#include "stmtmv/baselines.hpp"

#include <cmath>

#include "fista_core.hpp"
#include "stmtmv/errors.hpp"

namespace stmtmv::baselines {

std::string kind_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::decay: return "decay";
    case BaselineKind::ols: return "ols";
    case BaselineKind::lasso: return "lasso";
    case BaselineKind::mrmtl: return "mrmtl";
  }
  return "ols";
}

DecayModel decay_fit(const features::TimeSeriesWindow& series) {
  const auto& c = series.values;
  if (c.size() < 2) throw InvalidInput("decay_fit: need at least 2 samples");
  for (double v : c) {
    if (!(v > 0.0)) throw InvalidInput("decay_fit: concentrations must be strictly positive");
  }
  const int n = static_cast<int>(c.size());
  const double step_h = series.step_minutes / 60.0;

  double tbar = 0.0, lbar = 0.0;
  for (int i = 0; i < n; ++i) {
    tbar += i * step_h;
    lbar += std::log(c[i]);
  }
  tbar /= n;
  lbar /= n;
  double stl = 0.0, stt = 0.0;
  for (int i = 0; i < n; ++i) {
    stl += (i * step_h - tbar) * (std::log(c[i]) - lbar);
    stt += (i * step_h - tbar) * (i * step_h - tbar);
  }
  const double slope = stt > 0.0 ? stl / stt : 0.0;

  DecayModel m;
  m.k = std::max(0.0, -slope);
  m.c0 = std::exp(lbar - slope * tbar);
  return m;
}

double decay_predict(const DecayModel& m, double horizon_hours) {
  if (horizon_hours < 0.0) throw InvalidInput("decay_predict: horizon must be non-negative");
  return m.c0 * std::exp(-m.k * horizon_hours);
}

double decay_forecast(const features::TimeSeriesWindow& series, double horizon_hours) {
  DecayModel m = decay_fit(series);
  m.c0 = series.values.back();
  return decay_predict(m, horizon_hours);
}

Eigen::VectorXd baseline_predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
  if (X.cols() != w.size()) throw InvalidInput("baseline_predict: shape mismatch");
  return X * w;
}

BaselineModel ols_fit(const solver::StationDataset& data) {
  data.validate();
  BaselineModel model;
  model.kind = BaselineKind::ols;
  model.W.resize(data.dim(), data.tasks());
  for (int l = 0; l < data.tasks(); ++l) {
    const Eigen::MatrixXd X = data.full_matrix(l);
    Eigen::MatrixXd A = X.transpose() * X;
    A.diagonal().array() += 1e-8;
    const Eigen::VectorXd w = A.ldlt().solve(X.transpose() * data.y[l]);
    if (!w.allFinite()) {
      throw NumericFailure("ols_fit: normal equations unsolvable for station '" + data.ids[l] + "'");
    }
    model.W.col(l) = w;
  }
  return model;
}

BaselineModel lasso_fit(const solver::StationDataset& data, double alpha) {
  data.validate();
  if (alpha < 0.0) throw InvalidInput("lasso_fit: alpha must be non-negative");

  std::vector<Eigen::MatrixXd> XtX(data.tasks());
  std::vector<Eigen::VectorXd> Xty(data.tasks());
  double yty = 0.0;
  for (int l = 0; l < data.tasks(); ++l) {
    const Eigen::MatrixXd X = data.full_matrix(l);
    XtX[l] = X.transpose() * X;
    Xty[l] = X.transpose() * data.y[l];
    yty += data.y[l].squaredNorm();
  }

  detail::ProxProblem prob;
  prob.smooth_value = [&](const Eigen::MatrixXd& W) {
    double v = 0.5 * yty;
    for (int l = 0; l < data.tasks(); ++l) {
      v += 0.5 * W.col(l).dot(XtX[l] * W.col(l)) - W.col(l).dot(Xty[l]);
    }
    return v;
  };
  prob.smooth_grad = [&](const Eigen::MatrixXd& W) {
    Eigen::MatrixXd G(W.rows(), W.cols());
    for (int l = 0; l < data.tasks(); ++l) G.col(l) = XtX[l] * W.col(l) - Xty[l];
    return G;
  };
  prob.nonsmooth_value = [alpha](const Eigen::MatrixXd& W) {
    return alpha * W.cwiseAbs().sum();
  };
  prob.prox = [alpha](const Eigen::MatrixXd& B, double lipschitz) {
    const double beta = alpha / lipschitz;
    return Eigen::MatrixXd(
        B.unaryExpr([beta](double b) { return b > beta ? b - beta : (b < -beta ? b + beta : 0.0); }));
  };

  detail::FistaOptions opt;
  opt.max_iters = 20000;
  opt.tol = 1e-14;
  auto res = detail::fista_minimize(prob, data.dim(), data.tasks(), opt);

  BaselineModel model;
  model.kind = BaselineKind::lasso;
  model.alpha = alpha;
  model.W = std::move(res.W);
  return model;
}

BaselineModel mrmtl_fit(const solver::StationDataset& data, double lambda, double theta) {
  data.validate();
  if (lambda < 0.0 || theta < 0.0) {
    throw InvalidInput("mrmtl_fit: regularizers must be non-negative");
  }
  const int M = data.tasks();
  const int D = data.dim();

  std::vector<Eigen::MatrixXd> XtX(M);
  std::vector<Eigen::VectorXd> Xty(M);
  double yty = 0.0;
  for (int l = 0; l < M; ++l) {
    const Eigen::MatrixXd X = data.full_matrix(l);
    XtX[l] = X.transpose() * X;
    Xty[l] = X.transpose() * data.y[l];
    yty += data.y[l].squaredNorm();
  }

  auto value = [&](const Eigen::MatrixXd& W) {
    double v = 0.5 * yty;
    for (int l = 0; l < M; ++l) {
      v += 0.5 * W.col(l).dot(XtX[l] * W.col(l)) - W.col(l).dot(Xty[l]);
    }
    const Eigen::VectorXd mean = W.rowwise().mean();
    for (int l = 0; l < M; ++l) v += lambda * (W.col(l) - mean).squaredNorm();
    return v + theta * W.squaredNorm();
  };
  auto gradient = [&](const Eigen::MatrixXd& W) {
    Eigen::MatrixXd G(D, M);
    const Eigen::VectorXd mean = W.rowwise().mean();
    for (int l = 0; l < M; ++l) {
      G.col(l) = XtX[l] * W.col(l) - Xty[l] + 2.0 * lambda * (W.col(l) - mean) +
                 2.0 * theta * W.col(l);
    }
    return G;
  };

  // Backtracking (Armijo) gradient descent; the step only shrinks.
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(D, M);
  double F = value(W);
  double step = 1.0;
  const int max_iters = 200000;
  const double rel_tol = 1e-8;
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::MatrixXd G = gradient(W);
    const double gnorm2 = G.squaredNorm();
    if (gnorm2 == 0.0) break;

    double F_new = 0.0;
    Eigen::MatrixXd W_new;
    while (true) {
      W_new = W - step * G;
      F_new = value(W_new);
      if (F_new <= F - 0.5 * step * gnorm2 + 1e-12 * std::max(1.0, std::abs(F))) break;
      step *= 0.5;
      if (step < 1e-18) {
        W_new = W;
        F_new = F;
        break;
      }
    }
    if (!std::isfinite(F_new)) {
      throw NumericFailure("mrmtl_fit: objective became non-finite at iteration " +
                           std::to_string(it + 1));
    }
    const double drop = F - F_new;
    W = std::move(W_new);
    F = F_new;
    if (drop <= rel_tol * std::max(1.0, std::abs(F))) break;
  }

  BaselineModel model;
  model.kind = BaselineKind::mrmtl;
  model.lambda = lambda;
  model.theta = theta;
  model.W = std::move(W);
  return model;
}

}  // namespace stmtmv::baselines
