#include "ramda/subproblem.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace ramda {

void QuadraticSubproblem::validate() const {
  if (reg == nullptr) throw std::invalid_argument("subproblem: null regularizer");
  if (precond.size() != linear.size() || anchor.size() != linear.size())
    throw std::invalid_argument("subproblem: shape mismatch");
  if (linear.size() == 0) throw std::invalid_argument("subproblem: empty");
  if (precond.minCoeff() <= 0.0)
    throw std::invalid_argument("subproblem: preconditioner must be positive");
  if (psi_scale <= 0.0)
    throw std::invalid_argument("subproblem: psi_scale must be positive");
}

double QuadraticSubproblem::smooth_value(const Eigen::VectorXd& z) const {
  if (z.size() != linear.size())
    throw std::invalid_argument("subproblem: shape mismatch");
  const Eigen::ArrayXd d = (z - anchor).array();
  return linear.dot(z) + 0.5 * (d * d * precond.array()).sum();
}

Eigen::VectorXd QuadraticSubproblem::smooth_grad(const Eigen::VectorXd& z) const {
  if (z.size() != linear.size())
    throw std::invalid_argument("subproblem: shape mismatch");
  return linear + precond.cwiseProduct(z - anchor);
}

double eval_objective(const QuadraticSubproblem& sub, const Eigen::VectorXd& z) {
  return sub.psi_scale * sub.reg->value(z) + sub.smooth_value(z);
}

Eigen::VectorXd pg_step(const QuadraticSubproblem& sub, const Eigen::VectorXd& z,
                        double theta) {
  if (theta <= 0.0) throw std::invalid_argument("pg_step: theta must be > 0");
  Eigen::VectorXd y = z - theta * sub.smooth_grad(z);
  sub.reg->prox_inplace(y, theta * sub.psi_scale);
  return y;
}

double certificate(const QuadraticSubproblem& sub, const Eigen::VectorXd& z_prev,
                   const Eigen::VectorXd& z_new, double theta) {
  if (theta <= 0.0) throw std::invalid_argument("certificate: theta must be > 0");
  check_same_length(z_prev, z_new);
  const double inv = 1.0 / theta;
  return ((sub.precond.array() - inv) * (z_new - z_prev).array())
      .matrix()
      .norm();
}

std::vector<int> screen_zero_groups(const QuadraticSubproblem& sub) {
  const auto* gl = dynamic_cast<const GroupLassoRegularizer*>(sub.reg);
  if (gl == nullptr)
    throw std::invalid_argument("screening needs a group-separable regularizer");
  std::vector<int> screened;
  const GroupLayout& gr = gl->groups();
  for (int gi = 0; gi < gr.num_groups(); ++gi) {
    const Group& g = gr.group(gi);
    double sq = 0.0;
    for (int i = 0; i < g.indices.size(); ++i) {
      const int k = g.indices[i];
      const double r = sub.linear[k] - sub.precond[k] * sub.anchor[k];
      sq += r * r;
    }
    if (std::sqrt(sq) <= sub.psi_scale * g.weight) screened.push_back(gi);
  }
  return screened;
}

namespace {

void zero_groups(const GroupLassoRegularizer& gl, const std::vector<int>& ids,
                 Eigen::VectorXd& z) {
  for (int gi : ids) {
    const Group& g = gl.groups().group(gi);
    for (int i = 0; i < g.indices.size(); ++i) z[g.indices[i]] = 0.0;
  }
}

}  // namespace

std::pair<Eigen::VectorXd, PGReport> solve(const QuadraticSubproblem& sub,
                                           const Eigen::VectorXd& z0,
                                           double theta,
                                           const SolveOptions& opts) {
  sub.validate();
  if (theta <= 0.0) throw std::invalid_argument("solve: theta must be > 0");
  if (opts.max_iters < 1) throw std::invalid_argument("solve: max_iters < 1");
  if (opts.tol <= 0.0) throw std::invalid_argument("solve: tol must be > 0");

  const double th = sub.reg->convex() ? theta : theta / 2.0;

  Eigen::VectorXd z = z0;
  const auto* gl = dynamic_cast<const GroupLassoRegularizer*>(sub.reg);
  std::vector<int> screened;
  if (gl != nullptr) {
    screened = screen_zero_groups(sub);
    zero_groups(*gl, screened, z);
  }

  // Pdiag == 1/theta makes the step member vanish identically; then the
  // certificate is only accepted at an (approximate) fixed point.
  const bool degenerate = (sub.precond.array() == 1.0 / th).all();

  const double q0 = eval_objective(sub, z);
  double q_prev = q0;
  PGReport report;
  report.objective = q0;

  for (int j = 1; j <= opts.max_iters; ++j) {
    Eigen::VectorXd z_new = pg_step(sub, z, th);
    if (gl != nullptr) zero_groups(*gl, screened, z_new);
    const double cert = certificate(sub, z, z_new, th);
    const double q = eval_objective(sub, z_new);
#ifndef NDEBUG
    if (sub.reg->convex())
      assert(q <= q_prev + 1e-9 * (1.0 + std::abs(q_prev)));
#endif
    report.iterations = j;
    report.certificate = cert;
    report.objective = q;

    bool cert_ok = cert <= opts.tol && q <= q0;
    if (degenerate)
      cert_ok = cert_ok && (z_new - z).norm() <= opts.tol * th;
    if (cert_ok && j >= opts.min_iters) {
      report.stop_reason = StopReason::kCertificate;
      return {std::move(z_new), report};
    }
    if (opts.early_stop && j >= opts.min_iters &&
        (q_prev - q) / (std::abs(q) + 1.0) < 1e-8) {
      report.stop_reason = StopReason::kEarlyStop;
      return {std::move(z_new), report};
    }
    z = std::move(z_new);
    q_prev = q;
  }
  report.stop_reason = StopReason::kIterationCap;
  return {std::move(z), report};
}

}  // namespace ramda
