#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "stmtmv/pipegraph.hpp"

namespace stmtmv::solver {

// Per-station design matrices split into the spatial and temporal views,
// plus the target vector. All stations share D_s and D_t; sample counts may
// differ per station.
struct StationDataset {
  int Ds = 0;
  int Dt = 0;
  std::vector<std::string> ids;
  std::vector<Eigen::MatrixXd> Xs;  // N_l x Ds
  std::vector<Eigen::MatrixXd> Xt;  // N_l x Dt
  std::vector<Eigen::VectorXd> y;   // N_l

  int tasks() const { return static_cast<int>(ids.size()); }
  int dim() const { return Ds + Dt; }
  Eigen::MatrixXd full_matrix(int l) const;  // [Xs_l | Xt_l]
  void validate() const;
};

// Model parameters W in R^{DxM}; column l splits into a spatial block of
// length Ds followed by the temporal block.
struct WeightMatrix {
  Eigen::MatrixXd W;
  int Ds = 0;

  Eigen::VectorXd spatial(int l) const { return W.col(l).head(Ds); }
  Eigen::VectorXd temporal(int l) const { return W.col(l).tail(W.rows() - Ds); }
};

enum class Variant { full, us, ws, sv };

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

struct SolverParams {
  double lambda = 0.0;  // view agreement
  double gamma = 0.0;   // Laplacian coupling
  double theta = 0.0;   // group sparsity
  int max_iters = 2000;
  double tol = 1e-6;           // relative objective change
  double lipschitz0 = 1.0;     // initial line-search estimate
  double backtrack_eta = 2.0;  // line-search growth factor
  Variant variant = Variant::full;

  void validate() const;
};

struct FitReport {
  WeightMatrix weights;
  std::vector<double> objective_trace;  // F(W^(k)) per completed iteration
  int iterations = 0;
  bool converged = false;
  double final_lipschitz = 0.0;
};

// Late-fusion prediction, y_hat = 0.5 * X * w.
Eigen::VectorXd predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& w);

// Full objective
//   0.5 sum_l ||y_l - 0.5 X_l w_l||^2 + lambda sum_l ||Xs_l ws_l - Xt_l wt_l||^2
//   + gamma tr(W L W^T) + theta ||W||_{2,1}
// evaluated directly from the data. The variant switch is ignored here; it
// only affects what fista_fit optimizes.
double objective(const WeightMatrix& wm, const StationDataset& data,
                 const pipes::TaskCoupling& coupling, const SolverParams& p);

// Gradient of the smooth part, column l:
//   0.5 X_l^T (0.5 X_l w_l - y_l) + lambda P_l w_l + 2 gamma (W L) col l
// using per-station precomputed X^T X, X^T y and the view block matrix P.
Eigen::MatrixXd grad_smooth(const WeightMatrix& wm, const StationDataset& data,
                            const pipes::TaskCoupling& coupling, const SolverParams& p);

// Row-wise group soft threshold: each row b maps to max(0, 1 - beta/||b||) b.
Eigen::MatrixXd prox_group_l21(const Eigen::MatrixXd& B, double beta);

// FISTA state with the N-independent precomputation done once up front.
// Construction costs O(N D^2); each run() iteration costs O((D+M) D M).
class FistaWorkspace {
public:
  FistaWorkspace(const StationDataset& data, const pipes::TaskCoupling& coupling,
                 const SolverParams& params);
  ~FistaWorkspace();
  FistaWorkspace(FistaWorkspace&&) noexcept;

  FitReport run() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Runs Algorithm-1 FISTA with backtracking line search from W = 0. Variant
// switches: `us` swaps the coupling for its uniform counterpart, `ws` drops
// theta, `sv` drops lambda. Throws NumericFailure naming the iteration if
// the objective turns non-finite.
FitReport fista_fit(const StationDataset& data, const pipes::TaskCoupling& coupling,
                    const SolverParams& params);

}  // namespace stmtmv::solver
