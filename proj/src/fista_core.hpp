#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "stmtmv/errors.hpp"

namespace stmtmv::detail {

// One proximal-gradient problem: minimize smooth(W) + nonsmooth(W) where the
// prox of nonsmooth/L is available in closed form.
struct ProxProblem {
  std::function<double(const Eigen::MatrixXd&)> smooth_value;
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> smooth_grad;
  std::function<double(const Eigen::MatrixXd&)> nonsmooth_value;
  // prox_{nonsmooth / lipschitz}(B)
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&, double lipschitz)> prox;
};

struct FistaOptions {
  int max_iters = 2000;
  double tol = 1e-6;
  double lipschitz0 = 1.0;
  double eta = 2.0;
};

struct FistaResult {
  Eigen::MatrixXd W;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
  double final_lipschitz = 0.0;
};

// FISTA with Beck-Teboulle backtracking. The Lipschitz estimate only grows,
// so the total number of backtracks over the whole run is bounded.
inline FistaResult fista_minimize(const ProxProblem& prob, Eigen::Index rows,
                                  Eigen::Index cols, const FistaOptions& opt) {
  if (opt.eta <= 1.0) throw InvalidInput("fista: backtracking eta must exceed 1");
  if (opt.tol <= 0.0) throw InvalidInput("fista: tolerance must be positive");
  if (opt.lipschitz0 <= 0.0) throw InvalidInput("fista: initial Lipschitz estimate must be positive");

  FistaResult res;
  Eigen::MatrixXd W_old = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::MatrixXd V = W_old;
  double t = 1.0;
  double L = opt.lipschitz0;
  double F_prev = prob.smooth_value(W_old) + prob.nonsmooth_value(W_old);

  for (int k = 1; k <= opt.max_iters; ++k) {
    const Eigen::MatrixXd G = prob.smooth_grad(V);
    const double hV = prob.smooth_value(V);

    Eigen::MatrixXd W_new;
    double h_new = 0.0;
    while (true) {
      W_new = prob.prox(V - G / L, L);
      h_new = prob.smooth_value(W_new);
      const Eigen::MatrixXd diff = W_new - V;
      const double quad = hV + G.cwiseProduct(diff).sum() + 0.5 * L * diff.squaredNorm();
      if (h_new <= quad + 1e-12 * std::max(1.0, std::abs(quad))) break;
      if (L > 1e16 * opt.lipschitz0) break;  // roundoff floor
      L *= opt.eta;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    V = W_new + ((t - 1.0) / t_next) * (W_new - W_old);
    W_old = W_new;
    t = t_next;

    const double F = h_new + prob.nonsmooth_value(W_new);
    if (!std::isfinite(F)) {
      throw NumericFailure("fista: objective became non-finite at iteration " +
                           std::to_string(k));
    }
    res.trace.push_back(F);
    res.iterations = k;
    if (std::abs(F_prev - F) <= opt.tol * std::max(1.0, std::abs(F_prev))) {
      res.converged = true;
      break;
    }
    F_prev = F;
  }

  res.W = std::move(W_old);
  res.final_lipschitz = L;
  return res;
}

}  // namespace stmtmv::detail
