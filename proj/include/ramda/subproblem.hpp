#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "ramda/regularizers.hpp"

namespace ramda {

// psi_scale * psi(Z) + <linear, Z> + 0.5 <Z - anchor, precond o (Z - anchor)>
// with a diagonal positive preconditioner. The smooth part has gradient
// Lipschitz constant exactly max(precond).
struct QuadraticSubproblem {
  Eigen::VectorXd linear;
  Eigen::VectorXd precond;
  Eigen::VectorXd anchor;
  double psi_scale = 1.0;
  const Regularizer* reg = nullptr;

  void validate() const;
  Eigen::Index dim() const { return linear.size(); }
  double smooth_value(const Eigen::VectorXd& z) const;
  Eigen::VectorXd smooth_grad(const Eigen::VectorXd& z) const;
};

double eval_objective(const QuadraticSubproblem& sub, const Eigen::VectorXd& z);

// One proximal-gradient step with step size theta > 0.
Eigen::VectorXd pg_step(const QuadraticSubproblem& sub, const Eigen::VectorXd& z,
                        double theta);

// Norm of the subgradient member generated by the PG step from z_prev to
// z_new: ||(precond - 1/theta) o (z_new - z_prev)||. Upper-bounds
// dist(0, dQ(z_new)).
double certificate(const QuadraticSubproblem& sub, const Eigen::VectorXd& z_prev,
                   const Eigen::VectorXd& z_new, double theta);

// Exact test for groups that are zero at the unique optimum; requires a
// group-lasso regularizer.
std::vector<int> screen_zero_groups(const QuadraticSubproblem& sub);

enum class StopReason { kCertificate, kEarlyStop, kIterationCap };

struct PGReport {
  int iterations = 0;
  double certificate = 0.0;
  StopReason stop_reason = StopReason::kIterationCap;
  double objective = 0.0;
};

struct SolveOptions {
  int max_iters = 100;       // T2
  double tol = 1e-6;         // certificate threshold
  bool early_stop = true;    // relative-improvement cutoff at 1e-8
  int min_iters = 1;
};

// Proximal gradient on the subproblem from z0; caller supplies
// theta = 1/max(precond). Halves theta once for nonconvex psi. Exits at
// the first iterate where the certificate holds together with
// non-increase of the objective, at the early-stop ratio, or at the
// iteration cap (not an error).
std::pair<Eigen::VectorXd, PGReport> solve(const QuadraticSubproblem& sub,
                                           const Eigen::VectorXd& z0,
                                           double theta,
                                           const SolveOptions& opts);

}  // namespace ramda
