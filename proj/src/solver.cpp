#include "stmtmv/solver.hpp"

#include <cmath>

#include "fista_core.hpp"
#include "stmtmv/errors.hpp"

namespace stmtmv::solver {

Eigen::MatrixXd StationDataset::full_matrix(int l) const {
  Eigen::MatrixXd X(Xs[l].rows(), Ds + Dt);
  X << Xs[l], Xt[l];
  return X;
}

void StationDataset::validate() const {
  const auto M = ids.size();
  if (M == 0) throw InvalidInput("StationDataset: no stations");
  if (Xs.size() != M || Xt.size() != M || y.size() != M) {
    throw InvalidInput("StationDataset: per-station containers disagree in length");
  }
  for (std::size_t l = 0; l < M; ++l) {
    if (Xs[l].cols() != Ds || Xt[l].cols() != Dt) {
      throw InvalidInput("StationDataset: station '" + ids[l] + "' has mismatched view widths");
    }
    if (Xs[l].rows() != Xt[l].rows() || Xs[l].rows() != y[l].size() || y[l].size() < 1) {
      throw InvalidInput("StationDataset: station '" + ids[l] + "' has mismatched sample counts");
    }
    if (!Xs[l].allFinite() || !Xt[l].allFinite() || !y[l].allFinite()) {
      throw InvalidInput("StationDataset: station '" + ids[l] + "' contains non-finite entries");
    }
  }
}

Variant parse_variant(const std::string& name) {
  if (name == "full") return Variant::full;
  if (name == "us") return Variant::us;
  if (name == "ws") return Variant::ws;
  if (name == "sv") return Variant::sv;
  throw InvalidInput("unknown solver variant '" + name + "'");
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::us: return "us";
    case Variant::ws: return "ws";
    case Variant::sv: return "sv";
  }
  return "full";
}

void SolverParams::validate() const {
  if (lambda < 0.0 || gamma < 0.0 || theta < 0.0) {
    throw InvalidInput("SolverParams: regularization weights must be non-negative");
  }
  if (backtrack_eta <= 1.0) throw InvalidInput("SolverParams: eta must exceed 1");
  if (tol <= 0.0) throw InvalidInput("SolverParams: tol must be positive");
  if (max_iters < 1) throw InvalidInput("SolverParams: max_iters must be >= 1");
  if (lipschitz0 <= 0.0) throw InvalidInput("SolverParams: L0 must be positive");
}

Eigen::VectorXd predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
  if (X.cols() != w.size()) {
    throw InvalidInput("predict: X has " + std::to_string(X.cols()) + " columns but w has " +
                       std::to_string(w.size()) + " entries");
  }
  return 0.5 * (X * w);
}

namespace {

void check_shapes(const WeightMatrix& wm, const StationDataset& data,
                  const pipes::TaskCoupling& coupling) {
  data.validate();
  if (wm.W.rows() != data.dim() || wm.W.cols() != data.tasks() || wm.Ds != data.Ds) {
    throw InvalidInput("weight matrix shape does not match the dataset");
  }
  if (coupling.tasks() != data.tasks()) {
    throw InvalidInput("coupling has " + std::to_string(coupling.tasks()) + " tasks, dataset has " +
                       std::to_string(data.tasks()));
  }
}

struct StationPrecompute {
  Eigen::MatrixXd XtX;  // D x D
  Eigen::VectorXd Xty;  // D
  double yty = 0.0;
  Eigen::MatrixXd P;  // view-agreement block matrix, D x D
};

StationPrecompute precompute_station(const StationDataset& data, int l) {
  StationPrecompute pc;
  const Eigen::MatrixXd X = data.full_matrix(l);
  pc.XtX = X.transpose() * X;
  pc.Xty = X.transpose() * data.y[l];
  pc.yty = data.y[l].squaredNorm();

  const int Ds = data.Ds, Dt = data.Dt;
  pc.P = Eigen::MatrixXd(Ds + Dt, Ds + Dt);
  pc.P.topLeftCorner(Ds, Ds) = 2.0 * pc.XtX.topLeftCorner(Ds, Ds);
  pc.P.topRightCorner(Ds, Dt) = -2.0 * pc.XtX.topRightCorner(Ds, Dt);
  pc.P.bottomLeftCorner(Dt, Ds) = -2.0 * pc.XtX.bottomLeftCorner(Dt, Ds);
  pc.P.bottomRightCorner(Dt, Dt) = 2.0 * pc.XtX.bottomRightCorner(Dt, Dt);
  return pc;
}

double group_l21_norm(const Eigen::MatrixXd& W) {
  double n = 0.0;
  for (Eigen::Index i = 0; i < W.rows(); ++i) n += W.row(i).norm();
  return n;
}

}  // namespace

double objective(const WeightMatrix& wm, const StationDataset& data,
                 const pipes::TaskCoupling& coupling, const SolverParams& p) {
  check_shapes(wm, data, coupling);
  double loss = 0.0, view = 0.0;
  for (int l = 0; l < data.tasks(); ++l) {
    const Eigen::VectorXd w = wm.W.col(l);
    loss += 0.5 * (data.y[l] - predict(data.full_matrix(l), w)).squaredNorm();
    view += (data.Xs[l] * wm.spatial(l) - data.Xt[l] * wm.temporal(l)).squaredNorm();
  }
  const double laplacian = (wm.W * coupling.L).cwiseProduct(wm.W).sum();
  return loss + p.lambda * view + p.gamma * laplacian + p.theta * group_l21_norm(wm.W);
}

Eigen::MatrixXd grad_smooth(const WeightMatrix& wm, const StationDataset& data,
                            const pipes::TaskCoupling& coupling, const SolverParams& p) {
  check_shapes(wm, data, coupling);
  Eigen::MatrixXd G(data.dim(), data.tasks());
  const Eigen::MatrixXd WL = wm.W * coupling.L;
  for (int l = 0; l < data.tasks(); ++l) {
    const auto pc = precompute_station(data, l);
    G.col(l) = 0.25 * (pc.XtX * wm.W.col(l)) - 0.5 * pc.Xty + p.lambda * (pc.P * wm.W.col(l)) +
               2.0 * p.gamma * WL.col(l);
  }
  return G;
}

Eigen::MatrixXd prox_group_l21(const Eigen::MatrixXd& B, double beta) {
  if (beta < 0.0) throw InvalidInput("prox_group_l21: beta must be non-negative");
  Eigen::MatrixXd out = B;
  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    const double norm = B.row(i).norm();
    if (norm <= beta) {
      out.row(i).setZero();
    } else {
      out.row(i) *= 1.0 - beta / norm;
    }
  }
  return out;
}

struct FistaWorkspace::Impl {
  std::vector<StationPrecompute> stations;
  Eigen::MatrixXd L;  // effective Laplacian after the variant switch
  double lambda = 0.0, gamma = 0.0, theta = 0.0;
  int D = 0, M = 0, Ds = 0;
  detail::FistaOptions options;

  double smooth(const Eigen::MatrixXd& W) const {
    double v = 0.0;
    for (int l = 0; l < M; ++l) {
      const auto& pc = stations[l];
      const Eigen::VectorXd w = W.col(l);
      v += 0.5 * pc.yty - 0.5 * w.dot(pc.Xty) + 0.125 * w.dot(pc.XtX * w);
      if (lambda != 0.0) v += 0.5 * lambda * w.dot(pc.P * w);
    }
    if (gamma != 0.0) v += gamma * (W * L).cwiseProduct(W).sum();
    return v;
  }

  Eigen::MatrixXd grad(const Eigen::MatrixXd& W) const {
    Eigen::MatrixXd G(D, M);
    for (int l = 0; l < M; ++l) {
      const auto& pc = stations[l];
      G.col(l) = 0.25 * (pc.XtX * W.col(l)) - 0.5 * pc.Xty;
      if (lambda != 0.0) G.col(l) += lambda * (pc.P * W.col(l));
    }
    if (gamma != 0.0) G += 2.0 * gamma * (W * L);
    return G;
  }
};

FistaWorkspace::FistaWorkspace(const StationDataset& data, const pipes::TaskCoupling& coupling,
                               const SolverParams& params)
    : impl_(std::make_unique<Impl>()) {
  params.validate();
  data.validate();
  if (coupling.tasks() != data.tasks()) {
    throw InvalidInput("fista_fit: coupling and dataset disagree on the task count");
  }

  impl_->lambda = params.lambda;
  impl_->gamma = params.gamma;
  impl_->theta = params.theta;
  impl_->L = coupling.L;
  switch (params.variant) {
    case Variant::full: break;
    case Variant::us: impl_->L = coupling.uniform_like().L; break;
    case Variant::ws: impl_->theta = 0.0; break;
    case Variant::sv: impl_->lambda = 0.0; break;
  }

  impl_->D = data.dim();
  impl_->M = data.tasks();
  impl_->Ds = data.Ds;
  impl_->stations.reserve(data.tasks());
  for (int l = 0; l < data.tasks(); ++l) impl_->stations.push_back(precompute_station(data, l));
  impl_->options = {params.max_iters, params.tol, params.lipschitz0, params.backtrack_eta};
}

FistaWorkspace::~FistaWorkspace() = default;
FistaWorkspace::FistaWorkspace(FistaWorkspace&&) noexcept = default;

FitReport FistaWorkspace::run() const {
  const Impl& im = *impl_;
  detail::ProxProblem prob;
  prob.smooth_value = [&im](const Eigen::MatrixXd& W) { return im.smooth(W); };
  prob.smooth_grad = [&im](const Eigen::MatrixXd& W) { return im.grad(W); };
  prob.nonsmooth_value = [&im](const Eigen::MatrixXd& W) {
    return im.theta == 0.0 ? 0.0 : im.theta * group_l21_norm(W);
  };
  prob.prox = [&im](const Eigen::MatrixXd& B, double lipschitz) {
    return im.theta == 0.0 ? B : prox_group_l21(B, im.theta / lipschitz);
  };

  auto res = detail::fista_minimize(prob, im.D, im.M, im.options);
  FitReport report;
  report.weights.W = std::move(res.W);
  report.weights.Ds = im.Ds;
  report.objective_trace = std::move(res.trace);
  report.iterations = res.iterations;
  report.converged = res.converged;
  report.final_lipschitz = res.final_lipschitz;
  return report;
}

FitReport fista_fit(const StationDataset& data, const pipes::TaskCoupling& coupling,
                    const SolverParams& params) {
  return FistaWorkspace(data, coupling, params).run();
}

}  // namespace stmtmv::solver
