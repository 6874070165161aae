#pragma once

#include <Eigen/Core>

#include "ramda/regularizers.hpp"
#include "ramda/subproblem.hpp"

namespace ramda {

// Stage-wise schedule: learning rate constant within a stage, momentum
// factor constant until the final stage where it ramps as min(c0*sqrt(i), 1),
// and inner tolerances eps_t = eps0/t so that sum eps_t^2 stays finite.
struct Schedule {
  std::vector<int> stage_epochs;
  std::vector<double> etas;
  double c0 = 0.01;
  double eps0 = 1e-3;
  double eps_stab0 = 1e-6;
  double eps_stab_decay = 1.0;

  void validate() const;
  int num_stages() const { return static_cast<int>(stage_epochs.size()); }
  int total_epochs() const;
  int stage_of_epoch(int epoch) const;
  bool is_final_stage(int stage) const { return stage == num_stages() - 1; }
  double eta(int stage) const { return etas.at(stage); }
  double momentum_c(int stage, long step_in_final_stage) const;
  double eps_t(long step) const { return eps0 / static_cast<double>(step); }
};

// Dual-averaging accumulators plus restart bookkeeping.
struct DualState {
  Eigen::VectorXd v;
  Eigen::VectorXd u;
  Eigen::VectorXd w0;
  double alpha = 0.0;
  long t = 0;
  double eps_stab = 0.0;
};

struct StepResult {
  Eigen::VectorXd w;      // averaged iterate
  Eigen::VectorXd w_hat;  // subproblem solution (exact zeros live here)
  PGReport report;
};

// Dual averaging with the cube-root adaptive preconditioner and an
// inexact PG inner solve against the stage anchor.
class RamdaOptimizer {
 public:
  RamdaOptimizer(const Regularizer* reg, Eigen::VectorXd w0, double eps_stab,
                 SolveOptions pg = {});

  StepResult step(const Eigen::VectorXd& w_prev, const Eigen::VectorXd& grad,
                  double eta_t, double c_t, double eps_t);
  void restart(const Eigen::VectorXd& w_final, double eps_stab_factor);
  const DualState& state() const { return state_; }

 private:
  const Regularizer* reg_;
  DualState state_;
  SolveOptions pg_;
};

// Identity-preconditioned dual averaging; the subproblem has a
// closed-form prox solution.
class RmdaOptimizer {
 public:
  RmdaOptimizer(const Regularizer* reg, Eigen::VectorXd w0);

  StepResult step(const Eigen::VectorXd& w_prev, const Eigen::VectorXd& grad,
                  double eta_t, double c_t);
  void restart(const Eigen::VectorXd& w_final);
  const DualState& state() const { return state_; }

 private:
  const Regularizer* reg_;
  DualState state_;
};

// Momentum + AdamW-style preconditioner with the inexact PG inner solve
// centered at the current iterate.
class ProxGenOptimizer {
 public:
  struct Options {
    double rho0 = 0.9;
    double mu = 0.9999;  // rho_t = rho0 * mu^(t-1)
    double beta2 = 0.999;
    double delta = 1e-8;  // preconditioner floor
    // as SolveOptions but with a 2-iteration floor on the inner solve
    SolveOptions pg{100, 1e-6, true, 2};
  };

  ProxGenOptimizer(const Regularizer* reg, Eigen::Index dim)
      : ProxGenOptimizer(reg, dim, Options{}) {}
  ProxGenOptimizer(const Regularizer* reg, Eigen::Index dim, Options opts);

  StepResult step(const Eigen::VectorXd& w_prev, const Eigen::VectorXd& grad,
                  double eta_t, double eps_t);
  const Eigen::VectorXd& momentum() const { return m_; }
  long steps() const { return t_; }

 private:
  const Regularizer* reg_;
  Options opts_;
  Eigen::VectorXd m_;
  Eigen::VectorXd second_moment_;
  long t_ = 0;
};

// Momentum SGD followed by one exact prox.
class ProxSgdOptimizer {
 public:
  ProxSgdOptimizer(const Regularizer* reg, Eigen::Index dim, double rho = 0.9);

  Eigen::VectorXd step(const Eigen::VectorXd& w_prev,
                       const Eigen::VectorXd& grad, double eta_t);
  const Eigen::VectorXd& momentum() const { return m_; }

 private:
  const Regularizer* reg_;
  double rho_;
  Eigen::VectorXd m_;
  long t_ = 0;
};

}  // namespace ramda
