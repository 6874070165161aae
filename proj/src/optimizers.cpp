#include "ramda/optimizers.hpp"

#include <cmath>
#include <stdexcept>

namespace ramda {

void Schedule::validate() const {
  if (stage_epochs.empty()) throw std::invalid_argument("schedule: no stages");
  if (etas.size() != stage_epochs.size())
    throw std::invalid_argument("schedule: etas must match stage count");
  for (int e : stage_epochs)
    if (e <= 0) throw std::invalid_argument("schedule: nonpositive stage length");
  for (double e : etas)
    if (e <= 0.0) throw std::invalid_argument("schedule: nonpositive eta");
  if (c0 < 0.0 || c0 > 1.0)
    throw std::invalid_argument("schedule: c0 must be in [0,1]");
  if (eps0 <= 0.0) throw std::invalid_argument("schedule: eps0 must be > 0");
  if (eps_stab0 <= 0.0)
    throw std::invalid_argument("schedule: eps_stab0 must be > 0");
  if (eps_stab_decay <= 0.0 || eps_stab_decay > 1.0)
    throw std::invalid_argument("schedule: eps_stab_decay must be in (0,1]");
}

int Schedule::total_epochs() const {
  int t = 0;
  for (int e : stage_epochs) t += e;
  return t;
}

int Schedule::stage_of_epoch(int epoch) const {
  int acc = 0;
  for (int s = 0; s < num_stages(); ++s) {
    acc += stage_epochs[s];
    if (epoch < acc) return s;
  }
  return num_stages() - 1;
}

double Schedule::momentum_c(int stage, long step_in_final_stage) const {
  if (!is_final_stage(stage)) return c0;
  return std::min(c0 * std::sqrt(static_cast<double>(step_in_final_stage)),
                  1.0);
}

RamdaOptimizer::RamdaOptimizer(const Regularizer* reg, Eigen::VectorXd w0,
                               double eps_stab, SolveOptions pg)
    : reg_(reg), pg_(pg) {
  state_.v = Eigen::VectorXd::Zero(w0.size());
  state_.u = Eigen::VectorXd::Zero(w0.size());
  state_.w0 = std::move(w0);
  state_.eps_stab = eps_stab;
  if (eps_stab <= 0.0)
    throw std::invalid_argument("ramda: eps_stab must be > 0");
}

StepResult RamdaOptimizer::step(const Eigen::VectorXd& w_prev,
                                const Eigen::VectorXd& grad, double eta_t,
                                double c_t, double eps_t) {
  if (eta_t <= 0.0) throw std::invalid_argument("ramda: eta_t must be > 0");
  if (c_t < 0.0 || c_t > 1.0)
    throw std::invalid_argument("ramda: c_t must be in [0,1]");
  check_finite(grad, "ramda gradient at t=" + std::to_string(state_.t + 1));

  state_.t += 1;
  const double s = eta_t * std::sqrt(static_cast<double>(state_.t));
  state_.v += s * grad;
  state_.u.array() += s * grad.array().square();
  state_.alpha += s;

  const Eigen::VectorXd pdiag =
      cbrt_elementwise(state_.u).array() + state_.eps_stab;
  const double theta = 1.0 / pdiag.maxCoeff();

  // Alg. 1 hands PG the alpha-scaled problem Q_t / alpha_t with step
  // alpha_t * theta_t; the certificate threshold applies to the scaled
  // objective.
  QuadraticSubproblem sub;
  sub.linear = state_.v / state_.alpha;
  sub.precond = pdiag / state_.alpha;
  sub.anchor = state_.w0;
  sub.psi_scale = 1.0;
  sub.reg = reg_;

  SolveOptions opts = pg_;
  opts.tol = eps_t;
  auto [w_hat, report] = solve(sub, w_prev, state_.alpha * theta, opts);

  StepResult out;
  out.w = (1.0 - c_t) * w_prev + c_t * w_hat;
  out.w_hat = std::move(w_hat);
  out.report = report;
  check_finite(out.w, "ramda iterate at t=" + std::to_string(state_.t));
  return out;
}

void RamdaOptimizer::restart(const Eigen::VectorXd& w_final,
                             double eps_stab_factor) {
  if (eps_stab_factor <= 0.0 || eps_stab_factor > 1.0)
    throw std::invalid_argument("restart: factor must be in (0,1]");
  state_.v.setZero();
  state_.u.setZero();
  state_.alpha = 0.0;
  state_.t = 0;
  state_.w0 = w_final;
  state_.eps_stab *= eps_stab_factor;
}

RmdaOptimizer::RmdaOptimizer(const Regularizer* reg, Eigen::VectorXd w0)
    : reg_(reg) {
  state_.v = Eigen::VectorXd::Zero(w0.size());
  state_.w0 = std::move(w0);
}

StepResult RmdaOptimizer::step(const Eigen::VectorXd& w_prev,
                               const Eigen::VectorXd& grad, double eta_t,
                               double c_t) {
  if (eta_t <= 0.0) throw std::invalid_argument("rmda: eta_t must be > 0");
  if (c_t < 0.0 || c_t > 1.0)
    throw std::invalid_argument("rmda: c_t must be in [0,1]");
  check_finite(grad, "rmda gradient at t=" + std::to_string(state_.t + 1));

  state_.t += 1;
  const double s = eta_t * std::sqrt(static_cast<double>(state_.t));
  state_.v += s * grad;
  state_.alpha += s;

  const double sqrt_t = std::sqrt(static_cast<double>(state_.t));
  Eigen::VectorXd w_hat = state_.w0 - state_.v / sqrt_t;
  reg_->prox_inplace(w_hat, state_.alpha / sqrt_t);

  StepResult out;
  out.w = (1.0 - c_t) * w_prev + c_t * w_hat;
  out.w_hat = std::move(w_hat);
  out.report = {};
  check_finite(out.w, "rmda iterate at t=" + std::to_string(state_.t));
  return out;
}

void RmdaOptimizer::restart(const Eigen::VectorXd& w_final) {
  state_.v.setZero();
  state_.alpha = 0.0;
  state_.t = 0;
  state_.w0 = w_final;
}

ProxGenOptimizer::ProxGenOptimizer(const Regularizer* reg, Eigen::Index dim,
                                   Options opts)
    : reg_(reg),
      opts_(opts),
      m_(Eigen::VectorXd::Zero(dim)),
      second_moment_(Eigen::VectorXd::Zero(dim)) {
  if (opts_.rho0 < 0.0 || opts_.rho0 >= 1.0 || opts_.mu < 0.0 || opts_.mu > 1.0)
    throw std::invalid_argument("proxgen: rho0 in [0,1), mu in [0,1]");
  if (opts_.delta <= 0.0)
    throw std::invalid_argument("proxgen: delta must be > 0");
}

StepResult ProxGenOptimizer::step(const Eigen::VectorXd& w_prev,
                                  const Eigen::VectorXd& grad, double eta_t,
                                  double eps_t) {
  if (eta_t <= 0.0) throw std::invalid_argument("proxgen: eta_t must be > 0");
  check_finite(grad, "proxgen gradient at t=" + std::to_string(t_ + 1));

  t_ += 1;
  const double rho_t =
      opts_.rho0 * std::pow(opts_.mu, static_cast<double>(t_ - 1));
  m_ = rho_t * m_ + (1.0 - rho_t) * grad;
  second_moment_ =
      opts_.beta2 * second_moment_ +
      (1.0 - opts_.beta2) * grad.cwiseProduct(grad);
  const double correction =
      1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
  const Eigen::VectorXd pdiag =
      (second_moment_ / correction).cwiseSqrt().cwiseMax(opts_.delta);

  QuadraticSubproblem sub;
  sub.linear = m_;
  sub.precond = pdiag / eta_t;
  sub.anchor = w_prev;
  sub.psi_scale = 1.0;
  sub.reg = reg_;

  SolveOptions opts = opts_.pg;
  opts.tol = eps_t;
  const double theta = eta_t / pdiag.maxCoeff();
  auto [w_new, report] = solve(sub, w_prev, theta, opts);

  StepResult out;
  out.w = w_new;
  out.w_hat = std::move(w_new);
  out.report = report;
  check_finite(out.w, "proxgen iterate at t=" + std::to_string(t_));
  return out;
}

ProxSgdOptimizer::ProxSgdOptimizer(const Regularizer* reg, Eigen::Index dim,
                                   double rho)
    : reg_(reg), rho_(rho), m_(Eigen::VectorXd::Zero(dim)) {
  if (rho_ < 0.0 || rho_ >= 1.0)
    throw std::invalid_argument("proxsgd: rho must be in [0,1)");
}

Eigen::VectorXd ProxSgdOptimizer::step(const Eigen::VectorXd& w_prev,
                                       const Eigen::VectorXd& grad,
                                       double eta_t) {
  if (eta_t <= 0.0) throw std::invalid_argument("proxsgd: eta_t must be > 0");
  check_finite(grad, "proxsgd gradient at t=" + std::to_string(t_ + 1));
  t_ += 1;
  m_ = rho_ * m_ + (1.0 - rho_) * grad;
  Eigen::VectorXd w = w_prev - eta_t * m_;
  reg_->prox_inplace(w, eta_t);
  check_finite(w, "proxsgd iterate at t=" + std::to_string(t_));
  return w;
}

}  // namespace ramda
